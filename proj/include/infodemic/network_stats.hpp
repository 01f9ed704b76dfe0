#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infodemic/ingestion.hpp"
#include "infodemic/role.hpp"

namespace infodemic {

enum class EdgeWeighting {
  Multiplicity,  // every share is one link unit
  Simple,        // parallel shares collapse to one link
};

struct Edge {
  UserId from = 0;  // retweeter
  UserId to = 0;    // retweeted
  std::uint64_t multiplicity = 0;

  bool operator==(const Edge&) const = default;
};

// Directed actor -> source graph over the log's full user universe.
struct RetweetNetwork {
  std::size_t node_count = 0;
  std::vector<Edge> edges;  // sorted by (from, to), no self-loops
  std::uint64_t total_links = 0;
};

RetweetNetwork build_network(const EventLog& log, EdgeWeighting weighting = EdgeWeighting::Multiplicity);

struct CategoryFilter {
  enum class Kind { All, Fake, One } kind = Kind::All;
  ContentCategory category = ContentCategory::Unlabeled;

  static CategoryFilter all() { return {}; }
  static CategoryFilter fake() { return {Kind::Fake, ContentCategory::Unlabeled}; }
  static CategoryFilter only(ContentCategory c) { return {Kind::One, c}; }

  bool matches(ContentCategory c) const noexcept;
  std::string label() const;
};

struct CurvePoint {
  double user_share = 0.0;
  double content_share = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

struct ConcentrationCurve {
  std::string label;
  std::vector<CurvePoint> points;  // one per user, most active first
};

// Users ranked by descending share count (as actor) within the filter; ties by
// user name. Throws EmptyResult when nothing matches.
ConcentrationCurve concentration_curve(const EventLog& log, const CategoryFilter& filter);

// Evenly spaced subset that keeps the first and last points.
std::vector<CurvePoint> downsample(const std::vector<CurvePoint>& points, std::size_t max_points);

void write_curves_csv(std::ostream& out, const std::vector<ConcentrationCurve>& curves);

enum class NullModel {
  UniformRandom,  // L link units placed uniformly over ordered node pairs
  Configuration,  // out/in strengths preserved
};

// Uniform-placement expectation of links from a group of size `from_size` to
// one of size `to_size` (same_group: the two are the same group). Throws
// DegenerateNetwork when N < 2 or L == 0.
double expected_links_random(const RetweetNetwork& net, std::size_t from_size, std::size_t to_size,
                             bool same_group);

struct DensityCell {
  std::uint64_t observed = 0;
  double expected = 0.0;
  std::optional<double> ratio;  // undefined for empty groups
};

struct DensityMatrix {
  std::array<std::size_t, 3> group_sizes{};
  std::array<std::array<DensityCell, 3>, 3> cells{};  // [from role][to role]
  std::uint64_t total_links = 0;
  NullModel null_model = NullModel::UniformRandom;

  const DensityCell& at(Role from, Role to) const { return cells[role_index(from)][role_index(to)]; }
};

struct DensityOptions {
  NullModel null_model = NullModel::UniformRandom;
  EdgeWeighting weighting = EdgeWeighting::Multiplicity;
};

// `roles` gives one role per network node.
DensityMatrix group_link_density(const RetweetNetwork& net, std::span<const Role> roles,
                                 NullModel null_model = NullModel::UniformRandom);

std::string density_to_json(const DensityMatrix& m);

}  // namespace infodemic
