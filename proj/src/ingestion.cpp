#include "infodemic/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

#include "infodemic/error.hpp"
#include "infodemic/io.hpp"
#include "json.hpp"

namespace infodemic {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<ShareKind> parse_kind(std::string_view s) {
  if (s.empty()) return ShareKind::Unspecified;
  const auto lower = lowercase(s);
  if (lower == "retweet") return ShareKind::Retweet;
  if (lower == "reply") return ShareKind::Reply;
  return std::nullopt;
}

// Raw textual fields of one record before interning.
struct RawRecord {
  std::string timestamp;
  std::string actor;
  std::string source;
  std::string domain;
  std::string category;
  std::string kind;
};

enum class Outcome { Accepted, Malformed, SelfShare };

Outcome accept_record(const RawRecord& raw, EventLogBuilder& builder) {
  const auto ts = parse_timestamp(io::trim(raw.timestamp));
  const auto actor = io::trim(raw.actor);
  const auto source = io::trim(raw.source);
  if (!ts || actor.empty() || source.empty()) return Outcome::Malformed;

  ShareEvent e;
  e.timestamp = *ts;
  const auto cat_text = io::trim(raw.category);
  if (!cat_text.empty()) {
    const auto cat = parse_category(cat_text);
    if (!cat) return Outcome::Malformed;
    e.category = *cat;
    e.category_pinned = true;
  }
  const auto kind = parse_kind(io::trim(raw.kind));
  if (!kind) return Outcome::Malformed;
  e.kind = *kind;
  if (actor == source) return Outcome::SelfShare;

  e.actor = builder.user(actor);
  e.source = builder.user(source);
  const auto domain = io::trim(raw.domain);
  if (!domain.empty()) e.domain = builder.domain(lowercase(domain));
  builder.add(e);
  return Outcome::Accepted;
}

std::optional<RawRecord> csv_record(std::string_view line, const std::vector<int>& columns) {
  auto fields = io::split_csv_line(line);
  if (!fields) return std::nullopt;
  // columns: index of timestamp, actor, source, domain, category, kind (-1 if absent)
  std::size_t expected = 0;
  for (int c : columns) expected = std::max<std::size_t>(expected, c < 0 ? 0 : static_cast<std::size_t>(c) + 1);
  if (fields->size() < expected) return std::nullopt;
  auto get = [&](int col) { return col < 0 ? std::string{} : (*fields)[static_cast<std::size_t>(col)]; };
  return RawRecord{get(columns[0]), get(columns[1]), get(columns[2]),
                   get(columns[3]), get(columns[4]), get(columns[5])};
}

std::optional<std::string> json_text(const nlohmann::json& obj, const char* key, bool allow_number) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::string{};
  if (it->is_string()) return it->get<std::string>();
  if (allow_number && it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  return std::nullopt;
}

std::optional<RawRecord> json_record(std::string_view line) {
  auto obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  RawRecord raw;
  const std::pair<const char*, std::string*> fields[] = {
      {"timestamp", &raw.timestamp}, {"actor", &raw.actor}, {"source", &raw.source},
      {"domain", &raw.domain},       {"category", &raw.category}, {"kind", &raw.kind}};
  for (const auto& [key, dest] : fields) {
    const bool numeric_ok = std::string_view(key) == "timestamp" || std::string_view(key) == "actor" ||
                            std::string_view(key) == "source";
    auto v = json_text(obj, key, numeric_ok);
    if (!v) return std::nullopt;
    *dest = std::move(*v);
  }
  return raw;
}

}  // namespace

std::string_view category_name(ContentCategory c) {
  switch (c) {
    case ContentCategory::Unlabeled: return "Unlabeled";
    case ContentCategory::Science: return "Science";
    case ContentCategory::MainstreamMedia: return "MainstreamMedia";
    case ContentCategory::Satire: return "Satire";
    case ContentCategory::Clickbait: return "Clickbait";
    case ContentCategory::Political: return "Political";
    case ContentCategory::FakeHoax: return "FakeHoax";
    case ContentCategory::ConspiracyJunkScience: return "ConspiracyJunkScience";
  }
  return "Unlabeled";
}

std::optional<ContentCategory> parse_category(std::string_view name) {
  for (auto c : kLabeledCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view kind_name(ShareKind k) {
  switch (k) {
    case ShareKind::Retweet: return "retweet";
    case ShareKind::Reply: return "reply";
    case ShareKind::Unspecified: break;
  }
  return "";
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl" || name == "json") return Format::Jsonl;
  return std::nullopt;
}

std::int64_t day_of(std::int64_t timestamp) noexcept {
  auto d = timestamp / kSecondsPerDay;
  if (timestamp % kSecondsPerDay < 0) --d;
  return d;
}

std::int64_t EventLog::day_count() const noexcept { return day_of(window.end) - day_of(window.start) + 1; }

UserId EventLogBuilder::user(std::string_view name) {
  auto [it, inserted] = user_ids_.try_emplace(std::string(name), static_cast<UserId>(log_.users.size()));
  if (inserted) log_.users.emplace_back(name);
  return it->second;
}

DomainId EventLogBuilder::domain(std::string_view name) {
  auto [it, inserted] = domain_ids_.try_emplace(std::string(name), static_cast<DomainId>(log_.domains.size()));
  if (inserted) log_.domains.emplace_back(name);
  return it->second;
}

EventLog EventLogBuilder::finish() && {
  auto& ev = log_.events;
  std::stable_sort(ev.begin(), ev.end(),
                   [](const ShareEvent& a, const ShareEvent& b) { return a.timestamp < b.timestamp; });
  if (!ev.empty()) log_.window = {ev.front().timestamp, ev.back().timestamp};
  return std::move(log_);
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.find('-', 1) == std::string_view::npos) return parse_int<std::int64_t>(text);

  // YYYY-MM-DD[THH:MM:SS[.fff]][Z|+HH:MM|-HH:MM]
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_int<int>(text.substr(0, 4));
  const auto mo = parse_int<unsigned>(text.substr(5, 2));
  const auto d = parse_int<unsigned>(text.substr(8, 2));
  if (!y || !mo || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*mo}, std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t seconds = std::chrono::sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;

  auto rest = text.substr(10);
  if (rest.empty()) return seconds;
  if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':') return std::nullopt;
  const auto hh = parse_int<int>(rest.substr(0, 2));
  const auto mm = parse_int<int>(rest.substr(3, 2));
  const auto ss = parse_int<int>(rest.substr(6, 2));
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
  seconds += *hh * 3600 + *mm * 60 + *ss;
  rest.remove_prefix(8);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    if (i == 1) return std::nullopt;
    rest.remove_prefix(i);
  }
  if (rest.empty() || rest == "Z") return seconds;
  if ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && rest[3] == ':') {
    const auto oh = parse_int<int>(rest.substr(1, 2));
    const auto om = parse_int<int>(rest.substr(4, 2));
    if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
    const std::int64_t offset = *oh * 3600 + *om * 60;
    return rest[0] == '+' ? seconds - offset : seconds + offset;
  }
  return std::nullopt;
}

ParsedLog parse_events(std::istream& in, const ParseOptions& opts) {
  if (!in) fail(ErrorKind::UnreadableStream, "stream not readable");
  if (!(opts.max_malformed_fraction >= 0.0 && opts.max_malformed_fraction <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "malformed fraction limit must be in [0,1]");
  }
  EventLogBuilder builder;
  ParseReport report;
  std::vector<int> columns;
  bool header_seen = opts.format == Format::Jsonl;
  std::string line;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    if (!header_seen) {
      auto header = io::split_csv_line(line);
      if (!header) fail(ErrorKind::UnreadableStream, "bad CSV header");
      const char* names[] = {"timestamp", "actor", "source", "domain", "category", "kind"};
      for (const char* name : names) {
        const auto it = std::find_if(header->begin(), header->end(),
                                     [&](const std::string& h) { return io::trim(h) == name; });
        columns.push_back(it == header->end() ? -1 : static_cast<int>(it - header->begin()));
      }
      if (columns[0] < 0 || columns[1] < 0 || columns[2] < 0) {
        fail(ErrorKind::UnreadableStream, "CSV header lacks timestamp/actor/source");
      }
      header_seen = true;
      continue;
    }
    ++report.records;
    const auto raw = opts.format == Format::Csv ? csv_record(line, columns) : json_record(line);
    const Outcome outcome = raw ? accept_record(*raw, builder) : Outcome::Malformed;
    if (outcome == Outcome::Malformed) ++report.malformed;
    if (outcome == Outcome::SelfShare) ++report.self_shares;
  }
  if (in.bad()) fail(ErrorKind::UnreadableStream, "read error");
  if (report.records > 0 &&
      static_cast<double>(report.malformed) > opts.max_malformed_fraction * static_cast<double>(report.records)) {
    fail(ErrorKind::TooManyMalformed, std::to_string(report.malformed));
  }
  return {std::move(builder).finish(), report};
}

ParsedLog parse_events_file(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::UnreadableStream, path.string());
  return parse_events(in, opts);
}

void write_events(std::ostream& out, const EventLog& log, Format format) {
  if (format == Format::Csv) out << "timestamp,actor,source,domain,category,kind\n";
  for (const auto& e : log.events) {
    const std::string_view domain = e.domain == kNoDomain ? std::string_view{} : log.domains[e.domain];
    const std::string_view category =
        e.category == ContentCategory::Unlabeled ? std::string_view{} : category_name(e.category);
    const std::string_view kind = kind_name(e.kind);
    if (format == Format::Csv) {
      out << e.timestamp << ',' << io::csv_field(log.users[e.actor]) << ',' << io::csv_field(log.users[e.source])
          << ',' << io::csv_field(domain) << ',' << category << ',' << kind << '\n';
    } else {
      nlohmann::ordered_json obj;
      obj["timestamp"] = e.timestamp;
      obj["actor"] = log.users[e.actor];
      obj["source"] = log.users[e.source];
      if (!domain.empty()) obj["domain"] = domain;
      if (!category.empty()) obj["category"] = category;
      if (!kind.empty()) obj["kind"] = kind;
      out << obj.dump() << '\n';
    }
  }
}

std::optional<ContentCategory> CategoryTable::lookup(std::string_view host) const {
  const auto it = entries.find(lowercase(host));
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

CategoryTable parse_category_table(std::istream& in) {
  if (!in) fail(ErrorKind::UnreadableStream, "category table not readable");
  CategoryTable table;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv_line(line);
    if (!fields || fields->size() < 2) {
      fail(ErrorKind::InvalidArgument, "category table line " + std::to_string(line_no));
    }
    if (!header_seen) {
      if (io::trim((*fields)[0]) != "domain" || io::trim((*fields)[1]) != "category") {
        fail(ErrorKind::InvalidArgument, "category table header must be domain,category");
      }
      header_seen = true;
      continue;
    }
    const auto host = lowercase(io::trim((*fields)[0]));
    const auto cat = parse_category(io::trim((*fields)[1]));
    if (host.empty() || !cat) fail(ErrorKind::InvalidArgument, "category table line " + std::to_string(line_no));
    if (!table.entries.emplace(host, *cat).second) {
      fail(ErrorKind::InvalidArgument, "duplicate domain " + host);
    }
  }
  return table;
}

CategoryTable parse_category_table_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::UnreadableStream, path.string());
  return parse_category_table(in);
}

EventLog label_events(EventLog log, const CategoryTable& table) {
  std::vector<std::optional<ContentCategory>> by_domain(log.domains.size());
  for (std::size_t i = 0; i < log.domains.size(); ++i) by_domain[i] = table.lookup(log.domains[i]);
  for (auto& e : log.events) {
    if (e.category_pinned) continue;
    e.category = (e.domain != kNoDomain && by_domain[e.domain]) ? *by_domain[e.domain] : ContentCategory::Unlabeled;
  }
  return log;
}

EventLog filter_events(const EventLog& log, const FilterConfig& cfg) {
  if (cfg.start && cfg.end && *cfg.start > *cfg.end) {
    fail(ErrorKind::InvalidArgument, "filter start after end");
  }
  EventLog out;
  out.window = log.window;
  if (cfg.start) out.window.start = *cfg.start;
  if (cfg.end) out.window.end = *cfg.end;

  std::vector<std::uint8_t> user_used(log.users.size(), 0);
  std::vector<std::uint8_t> domain_used(log.domains.size(), 0);
  for (const auto& e : log.events) {
    if (cfg.start && e.timestamp < *cfg.start) continue;
    if (cfg.end && e.timestamp > *cfg.end) continue;
    if (cfg.exclude_unlabeled && e.category == ContentCategory::Unlabeled) continue;
    out.events.push_back(e);
    user_used[e.actor] = user_used[e.source] = 1;
    if (e.domain != kNoDomain) domain_used[e.domain] = 1;
  }

  std::vector<UserId> user_map(log.users.size(), 0);
  for (std::size_t i = 0; i < log.users.size(); ++i) {
    if (!user_used[i]) continue;
    user_map[i] = static_cast<UserId>(out.users.size());
    out.users.push_back(log.users[i]);
  }
  std::vector<DomainId> domain_map(log.domains.size(), kNoDomain);
  for (std::size_t i = 0; i < log.domains.size(); ++i) {
    if (!domain_used[i]) continue;
    domain_map[i] = static_cast<DomainId>(out.domains.size());
    out.domains.push_back(log.domains[i]);
  }
  for (auto& e : out.events) {
    e.actor = user_map[e.actor];
    e.source = user_map[e.source];
    if (e.domain != kNoDomain) e.domain = domain_map[e.domain];
  }
  return out;
}

}  // namespace infodemic
