#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace infodemic {

constexpr std::int64_t kSecondsPerDay = 86400;

enum class ContentCategory : std::uint8_t {
  Unlabeled,
  Science,
  MainstreamMedia,
  Satire,
  Clickbait,
  Political,
  FakeHoax,
  ConspiracyJunkScience,
};

inline constexpr ContentCategory kLabeledCategories[] = {
    ContentCategory::Science,   ContentCategory::MainstreamMedia, ContentCategory::Satire,
    ContentCategory::Clickbait, ContentCategory::Political,       ContentCategory::FakeHoax,
    ContentCategory::ConspiracyJunkScience,
};

constexpr bool is_fake(ContentCategory c) noexcept {
  return c == ContentCategory::Clickbait || c == ContentCategory::FakeHoax ||
         c == ContentCategory::ConspiracyJunkScience;
}

std::string_view category_name(ContentCategory c);
// Exact enumeration spellings only; "Unlabeled" is not accepted as input.
std::optional<ContentCategory> parse_category(std::string_view name);

// Record type. Accepted on input, carried through, never used in analysis.
enum class ShareKind : std::uint8_t { Unspecified, Retweet, Reply };

std::string_view kind_name(ShareKind k);

using UserId = std::uint32_t;
using DomainId = std::uint32_t;
inline constexpr DomainId kNoDomain = std::numeric_limits<DomainId>::max();

struct ShareEvent {
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  UserId actor = 0;            // retweeter
  UserId source = 0;           // retweeted author
  DomainId domain = kNoDomain;
  ContentCategory category = ContentCategory::Unlabeled;
  bool category_pinned = false;  // set explicitly on the record; the table never overrides it
  ShareKind kind = ShareKind::Unspecified;

  bool operator==(const ShareEvent&) const = default;
};

// Inclusive [start, end] in epoch seconds.
struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool operator==(const TimeWindow&) const = default;
};

std::int64_t day_of(std::int64_t timestamp) noexcept;

// Time-sorted events over interned user and domain dictionaries. Ids index
// into `users` / `domains`.
struct EventLog {
  std::vector<std::string> users;
  std::vector<std::string> domains;
  std::vector<ShareEvent> events;
  TimeWindow window;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }

  // Number of UTC calendar days the window touches.
  std::int64_t day_count() const noexcept;
  std::int64_t origin_day() const noexcept { return day_of(window.start); }
};

// Interns ids while records stream in.
class EventLogBuilder {
 public:
  UserId user(std::string_view name);
  DomainId domain(std::string_view name);
  void add(const ShareEvent& e) { log_.events.push_back(e); }
  // Sorts (stable) and derives the window from the event span.
  EventLog finish() &&;

 private:
  EventLog log_;
  std::unordered_map<std::string, UserId> user_ids_;
  std::unordered_map<std::string, DomainId> domain_ids_;
};

enum class Format { Csv, Jsonl };

std::optional<Format> parse_format(std::string_view name);

struct ParseOptions {
  Format format = Format::Csv;
  double max_malformed_fraction = 0.01;
};

struct ParseReport {
  std::size_t records = 0;  // non-blank data lines
  std::size_t malformed = 0;
  std::size_t self_shares = 0;  // actor == source, dropped
};

struct ParsedLog {
  EventLog log;
  ParseReport report;
};

// Timestamps: integer epoch seconds, or ISO-8601 date/date-time with optional
// fractional seconds (truncated) and Z / +HH:MM offset.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

ParsedLog parse_events(std::istream& in, const ParseOptions& opts);
ParsedLog parse_events_file(const std::filesystem::path& path, const ParseOptions& opts);

// Canonical serialization: epoch-second timestamps, category spelled out
// whenever the event is labeled.
void write_events(std::ostream& out, const EventLog& log, Format format);

struct CategoryTable {
  std::map<std::string, ContentCategory> entries;  // lowercase hostname keys

  std::optional<ContentCategory> lookup(std::string_view host) const;
};

// CSV with header `domain,category`. Duplicate hostnames are an error.
CategoryTable parse_category_table(std::istream& in);
CategoryTable parse_category_table_file(const std::filesystem::path& path);

// Explicit (pinned) categories win; other events take the table's category
// or become Unlabeled.
EventLog label_events(EventLog log, const CategoryTable& table);

struct FilterConfig {
  std::optional<std::int64_t> start;  // inclusive
  std::optional<std::int64_t> end;    // inclusive
  bool exclude_unlabeled = false;
};

// Order preserved. Dictionaries are compacted to referenced entries, keeping
// relative id order. The window becomes the configured range when given.
EventLog filter_events(const EventLog& log, const FilterConfig& cfg);

}  // namespace infodemic
