#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infodemic/classification.hpp"
#include "infodemic/ingestion.hpp"
#include "infodemic/role.hpp"

namespace infodemic {

// Missing values are NaN throughout this module.
using Series = std::vector<double>;

bool is_missing(double v) noexcept;

// Per-day fractions. Fake fraction is over all shares that day; creator and
// consumer fractions are over users active that day. Days without activity
// are NaN in every series and flagged in `missing`.
struct DailySeries {
  std::int64_t origin_day = 0;
  Series fake_fraction;
  Series creator_fraction;
  Series consumer_fraction;
  std::vector<bool> missing;

  std::vector<std::uint64_t> shares;
  std::vector<std::uint64_t> fake_shares;
  std::vector<std::uint64_t> active_users;
  std::vector<std::uint64_t> creators;
  std::vector<std::uint64_t> consumers;

  std::size_t size() const noexcept { return missing.size(); }
};

// `assign` must be a 1-day classification of the same log.
DailySeries daily_series(const EventLog& log, const RoleAssignment& assign);

void write_series_csv(std::ostream& out, const DailySeries& s);
DailySeries read_series_csv(std::istream& in);

// Centered moving average over the non-missing values in the window. Even
// widths use half weights at both ends so the window stays symmetric.
// Points whose window holds no data stay missing. Throws AllMissing.
Series moving_average(std::span<const double> series, int width);

// Maps the non-missing range to [0,1]; a constant series maps to 0.5.
Series minmax_rescale(std::span<const double> series);

// Lag-0 Pearson correlation over pairwise-complete days.
double cross_correlation(std::span<const double> a, std::span<const double> b);

enum class DayState : std::uint8_t { Creator = 0, Consumer = 1, Silent = 2 };

// counts[from][to] over consecutive day pairs of every assigned user, across
// the whole window span. Silent covers both NonSpreader and absent days.
struct TransitionMatrix {
  std::array<std::array<std::uint64_t, 3>, 3> counts{};
};

TransitionMatrix transition_counts(const RoleAssignment& assign);

struct ReturnRecord {
  UserId user = 0;
  Role from = Role::Creator;
  Role to = Role::Creator;
  std::int32_t gap = 0;          // silent days in between
  std::int32_t from_window = 0;

  bool operator==(const ReturnRecord&) const = default;
};

// One record per consecutive pair of a user's fake-spreader days.
std::vector<ReturnRecord> first_return_times(const RoleAssignment& assign);

struct GapBin {
  std::int32_t lo = 0;  // inclusive
  std::int32_t hi = 0;  // inclusive

  bool operator==(const GapBin&) const = default;
};

std::vector<GapBin> default_gap_bins();
// "0-2,3-8,9-17,18-45"
std::vector<GapBin> parse_gap_bins(const std::string& text);

struct ReturnBinStats {
  std::uint64_t to_creator = 0;
  std::uint64_t to_consumer = 0;
  std::optional<double> p_creator;  // empty bin: undefined
  std::optional<double> p_consumer;
};

struct ReturnProfile {
  std::vector<GapBin> bins;
  // [from: 0 = Creator, 1 = Consumer][bin]
  std::array<std::vector<ReturnBinStats>, 2> stats;
  std::uint64_t uncovered = 0;  // records whose gap falls in no bin
};

ReturnProfile return_probability(std::span<const ReturnRecord> records, const std::vector<GapBin>& bins);

std::string return_profile_to_json(const ReturnProfile& p);
ReturnProfile return_profile_from_json(const std::string& text);

}  // namespace infodemic
