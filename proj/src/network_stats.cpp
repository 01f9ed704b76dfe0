#include "infodemic/network_stats.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "infodemic/error.hpp"
#include "infodemic/io.hpp"
#include "json.hpp"

namespace infodemic {

RetweetNetwork build_network(const EventLog& log, EdgeWeighting weighting) {
  std::vector<std::uint64_t> keys;
  keys.reserve(log.events.size());
  for (const auto& e : log.events) {
    if (e.actor == e.source) continue;
    keys.push_back((static_cast<std::uint64_t>(e.actor) << 32) | e.source);
  }
  std::sort(keys.begin(), keys.end());

  RetweetNetwork net;
  net.node_count = log.users.size();
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const std::uint64_t mult = weighting == EdgeWeighting::Simple ? 1 : j - i;
    net.edges.push_back({static_cast<UserId>(keys[i] >> 32), static_cast<UserId>(keys[i] & 0xffffffffu), mult});
    net.total_links += mult;
    i = j;
  }
  return net;
}

bool CategoryFilter::matches(ContentCategory c) const noexcept {
  switch (kind) {
    case Kind::All: return true;
    case Kind::Fake: return is_fake(c);
    case Kind::One: return c == category;
  }
  return false;
}

std::string CategoryFilter::label() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Fake: return "fake";
    case Kind::One: return std::string(category_name(category));
  }
  return "all";
}

ConcentrationCurve concentration_curve(const EventLog& log, const CategoryFilter& filter) {
  std::vector<std::uint64_t> counts(log.users.size(), 0);
  std::uint64_t total = 0;
  for (const auto& e : log.events) {
    if (!filter.matches(e.category)) continue;
    ++counts[e.actor];
    ++total;
  }
  if (total == 0) fail(ErrorKind::EmptyResult, "no events match filter " + filter.label());

  std::vector<UserId> ranked;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (counts[u] > 0) ranked.push_back(static_cast<UserId>(u));
  }
  std::sort(ranked.begin(), ranked.end(), [&](UserId a, UserId b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return log.users[a] < log.users[b];
  });

  ConcentrationCurve curve;
  curve.label = filter.label();
  curve.points.reserve(ranked.size());
  std::uint64_t cumulative = 0;
  const double n_users = static_cast<double>(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    cumulative += counts[ranked[i]];
    curve.points.push_back({static_cast<double>(i + 1) / n_users,
                            static_cast<double>(cumulative) / static_cast<double>(total)});
  }
  return curve;
}

std::vector<CurvePoint> downsample(const std::vector<CurvePoint>& points, std::size_t max_points) {
  if (points.size() <= max_points || max_points < 2) return points;
  std::vector<CurvePoint> out;
  out.reserve(max_points);
  const std::size_t last = points.size() - 1;
  for (std::size_t i = 0; i < max_points; ++i) out.push_back(points[i * last / (max_points - 1)]);
  return out;
}

void write_curves_csv(std::ostream& out, const std::vector<ConcentrationCurve>& curves) {
  out << "user_share,content_share,category\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << io::format_double(p.user_share) << ',' << io::format_double(p.content_share) << ',' << c.label << '\n';
    }
  }
}

double expected_links_random(const RetweetNetwork& net, std::size_t from_size, std::size_t to_size,
                             bool same_group) {
  const auto n = static_cast<double>(net.node_count);
  if (net.node_count < 2 || net.total_links == 0) {
    fail(ErrorKind::DegenerateNetwork,
         "N=" + std::to_string(net.node_count) + " L=" + std::to_string(net.total_links));
  }
  if (same_group && from_size != to_size) fail(ErrorKind::InvalidArgument, "same group with different sizes");
  if (from_size > net.node_count || to_size > net.node_count) {
    fail(ErrorKind::InvalidArgument, "group larger than network");
  }
  const auto a = static_cast<double>(from_size);
  const auto b = same_group ? a - 1.0 : static_cast<double>(to_size);
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return static_cast<double>(net.total_links) * a * b / (n * (n - 1.0));
}

DensityMatrix group_link_density(const RetweetNetwork& net, std::span<const Role> roles, NullModel null_model) {
  if (roles.size() != net.node_count) {
    fail(ErrorKind::InvalidArgument, "roles must cover all " + std::to_string(net.node_count) + " nodes");
  }
  if (net.node_count < 2 || net.total_links == 0) {
    fail(ErrorKind::DegenerateNetwork,
         "N=" + std::to_string(net.node_count) + " L=" + std::to_string(net.total_links));
  }
  DensityMatrix m;
  m.total_links = net.total_links;
  m.null_model = null_model;
  for (Role r : roles) ++m.group_sizes[role_index(r)];

  std::array<double, 3> out_strength{};
  std::array<double, 3> in_strength{};
  for (const auto& e : net.edges) {
    const auto from = role_index(roles[e.from]);
    const auto to = role_index(roles[e.to]);
    m.cells[from][to].observed += e.multiplicity;
    out_strength[from] += static_cast<double>(e.multiplicity);
    in_strength[to] += static_cast<double>(e.multiplicity);
  }

  const auto links = static_cast<double>(net.total_links);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      auto& cell = m.cells[a][b];
      if (null_model == NullModel::UniformRandom) {
        cell.expected = expected_links_random(net, m.group_sizes[a], m.group_sizes[b], a == b);
      } else {
        cell.expected = out_strength[a] * in_strength[b] / links;
      }
      if (cell.expected > 0.0) cell.ratio = static_cast<double>(cell.observed) / cell.expected;
    }
  }
  return m;
}

std::string density_to_json(const DensityMatrix& m) {
  nlohmann::ordered_json j;
  j["null_model"] = m.null_model == NullModel::UniformRandom ? "uniform" : "configuration";
  j["total_links"] = m.total_links;
  nlohmann::ordered_json sizes;
  for (Role r : kRoles) sizes[std::string(role_name(r))] = m.group_sizes[role_index(r)];
  j["group_sizes"] = sizes;
  auto cells = nlohmann::ordered_json::array();
  for (Role from : kRoles) {
    for (Role to : kRoles) {
      const auto& c = m.at(from, to);
      nlohmann::ordered_json row;
      row["from"] = role_name(from);
      row["to"] = role_name(to);
      row["observed"] = c.observed;
      row["expected"] = c.expected;
      row["ratio"] = c.ratio ? nlohmann::ordered_json(*c.ratio) : nlohmann::ordered_json(nullptr);
      cells.push_back(row);
    }
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

}  // namespace infodemic
