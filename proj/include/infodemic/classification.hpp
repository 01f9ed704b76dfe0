#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "infodemic/ingestion.hpp"
#include "infodemic/network_stats.hpp"
#include "infodemic/role.hpp"

namespace infodemic {

struct ClassificationConfig {
  double threshold = 0.20;  // creator boundary, inclusive
  std::int64_t window_days = 1;

  void validate() const;
};

// Fake share of a user's activity. Throws EmptyActivity when total == 0.
double fake_fraction(std::uint64_t total, std::uint64_t fake);

Role classify_user(double fraction, const ClassificationConfig& cfg);

struct RoleCell {
  UserId user = 0;
  std::int32_t window = 0;
  Role role = Role::NonSpreader;
  std::uint32_t total = 0;
  std::uint32_t fake = 0;

  bool operator==(const RoleCell&) const = default;
};

// One cell per (user, window) with activity, sorted by (user, window).
// Users without activity in a window have no cell there.
struct RoleAssignment {
  std::vector<RoleCell> cells;
  std::size_t user_count = 0;  // size of the user universe the ids refer to
  std::int32_t window_count = 0;
  std::int64_t window_days = 1;
  std::int64_t origin_day = 0;
  double threshold = 0.20;

  bool operator==(const RoleAssignment&) const = default;
};

// Activity is attributed to the actor of each share. Unlabeled shares count
// toward the total but never as fake.
RoleAssignment classify_window(const EventLog& log, const ClassificationConfig& cfg);

// One window spanning the log's whole period.
RoleAssignment classify_static(const EventLog& log, double threshold);

// Per-node role for a single-window assignment; users without a cell are
// NonSpreader.
std::vector<Role> node_roles(const RoleAssignment& assign);

struct BehaviorGroup {
  std::size_t users = 0;
  std::size_t only_once = 0;  // exactly one fake-spreader window
  double fraction = 0.0;
  double only_once_fraction = 0.0;
};

struct BehaviorSummary {
  BehaviorGroup only_creators;
  BehaviorGroup only_consumers;
  BehaviorGroup mixed;
  std::size_t spreaders = 0;
};

BehaviorSummary behavior_summary(const RoleAssignment& assign);

struct SweepRecord {
  double threshold = 0.0;
  std::array<std::size_t, 3> group_sizes{};  // indexed by Role
  DensityMatrix density;
};

// Static (whole-period) classification per threshold, paired with the
// resulting link-density matrix.
std::vector<SweepRecord> sensitivity_sweep(const EventLog& log, const std::vector<double>& thresholds,
                                           const DensityOptions& opts = {});

// CSV `user,window,role,total,fake`.
void write_roles_csv(std::ostream& out, const RoleAssignment& assign, const EventLog& log);

}  // namespace infodemic
