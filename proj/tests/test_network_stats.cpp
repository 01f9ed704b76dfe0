#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "infodemic/classification.hpp"
#include "infodemic/error.hpp"
#include "infodemic/network_stats.hpp"
#include "infodemic/rng.hpp"
#include "infodemic/synthgen.hpp"

using namespace infodemic;

namespace {

struct LogMaker {
  EventLogBuilder b;
  std::int64_t ts = 0;
  void share(const std::string& from, const std::string& to, int times = 1,
             ContentCategory c = ContentCategory::Science) {
    for (int i = 0; i < times; ++i) {
      ShareEvent e;
      e.timestamp = ts++;
      e.actor = b.user(from);
      e.source = b.user(to);
      e.category = c;
      b.add(e);
    }
  }
  EventLog finish() { return std::move(b).finish(); }
};

// Count per actor, sort descending (ties by name), cumulate.
std::vector<CurvePoint> curve_oracle(const EventLog& log, const CategoryFilter& f) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& e : log.events) {
    if (!f.matches(e.category)) continue;
    ++counts[log.users[e.actor]];
    ++total;
  }
  std::vector<std::pair<std::string, long>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<CurvePoint> out;
  long cum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cum += v[i].second;
    out.push_back({static_cast<double>(i + 1) / static_cast<double>(v.size()),
                   static_cast<double>(cum) / static_cast<double>(total)});
  }
  return out;
}

}  // namespace

TEST_CASE("network edges accumulate multiplicity") {
  LogMaker m;
  m.share("u", "v", 2);
  m.share("v", "w");
  const auto log = m.finish();
  const auto net = build_network(log);
  REQUIRE(net.edges.size() == 2);
  CHECK(net.total_links == 3);
  CHECK(log.users[net.edges[0].from] == "u");
  CHECK(net.edges[0].multiplicity == 2);
  CHECK(net.edges[1].multiplicity == 1);
  CHECK(build_network(log, EdgeWeighting::Simple).total_links == 2);
  CHECK(build_network(EventLog{}).edges.empty());
}

TEST_CASE("uniform activity lies on the diagonal") {
  LogMaker m;
  for (const char* u : {"a", "b", "c", "d"}) m.share(u, "z", 5);
  const auto curve = concentration_curve(m.finish(), CategoryFilter::all());
  // z never acts, so only four actors.
  REQUIRE(curve.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(curve.points[i].user_share == doctest::Approx(0.25 * (i + 1)));
    CHECK(curve.points[i].content_share == doctest::Approx(0.25 * (i + 1)));
  }
}

TEST_CASE("one dominant user") {
  LogMaker m;
  m.share("big", "x", 90);
  for (int i = 0; i < 10; ++i) m.share("small" + std::to_string(i), "x");
  const auto curve = concentration_curve(m.finish(), CategoryFilter::all());
  CHECK(curve.points.front().user_share == doctest::Approx(1.0 / 11));
  CHECK(curve.points.front().content_share == doctest::Approx(0.90));
  CHECK_THROWS_AS(concentration_curve(m.finish(), CategoryFilter::fake()), Error);
}

TEST_CASE("curve matches the sort-and-cumulate oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    LogMaker m;
    for (int i = 0; i < 300; ++i) {
      const auto a = "u" + std::to_string(static_cast<int>(std::pow(rng.uniform() + 1e-9, -1.2)) % 60);
      m.share(a, "t" + std::to_string(rng.index(5)), 1, kLabeledCategories[rng.index(7)]);
    }
    const auto log = m.finish();
    for (const auto& f : {CategoryFilter::all(), CategoryFilter::fake(), CategoryFilter::only(ContentCategory::Satire)}) {
      std::vector<CurvePoint> expected;
      try {
        expected = curve_oracle(log, f);
      } catch (...) {
      }
      if (expected.empty()) {
        CHECK_THROWS_AS(concentration_curve(log, f), Error);
        continue;
      }
      CHECK(concentration_curve(log, f).points == expected);
    }
  }
}

TEST_CASE("downsampling keeps the ends") {
  std::vector<CurvePoint> pts;
  for (int i = 1; i <= 5000; ++i) pts.push_back({i / 5000.0, i / 5000.0});
  const auto d = downsample(pts, 1000);
  CHECK(d.size() <= 1000);
  CHECK(d.front() == pts.front());
  CHECK(d.back() == pts.back());
  CHECK(downsample(pts, 10000).size() == pts.size());
}

TEST_CASE("expected links arithmetic") {
  RetweetNetwork net;
  net.node_count = 4;
  net.total_links = 6;
  CHECK(expected_links_random(net, 1, 2, false) == doctest::Approx(1.0));
  CHECK(expected_links_random(net, 2, 2, true) == doctest::Approx(1.0));
  net.total_links = 0;
  CHECK_THROWS_AS(expected_links_random(net, 1, 2, false), Error);
  net.total_links = 1;
  net.node_count = 1;
  CHECK_THROWS_AS(expected_links_random(net, 1, 1, true), Error);
}

TEST_CASE("toy network density") {
  LogMaker m;
  m.share("c1", "cr");
  m.share("c2", "cr");
  m.share("c3", "cr");
  m.b.user("idle");
  const auto log = m.finish();
  const auto net = build_network(log);
  CHECK(net.node_count == 5);
  std::vector<Role> roles(5, Role::NonSpreader);
  for (UserId u = 0; u < 5; ++u) {
    if (log.users[u] == "cr") roles[u] = Role::Creator;
    if (log.users[u][0] == 'c' && log.users[u] != "cr") roles[u] = Role::Consumer;
  }
  const auto d = group_link_density(net, roles);
  const auto& cell = d.at(Role::Consumer, Role::Creator);
  CHECK(cell.observed == 3);
  CHECK(cell.expected == doctest::Approx(0.45));
  REQUIRE(cell.ratio);
  CHECK(*cell.ratio == doctest::Approx(3.0 / 0.45));
}

TEST_CASE("complete graph gives ratio one") {
  LogMaker m;
  const int n = 12;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) m.share("n" + std::to_string(i), "n" + std::to_string(j));
    }
  }
  const auto net = build_network(m.finish());
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Role> roles(n);
    for (auto& r : roles) r = kRoles[rng.index(3)];
    const auto d = group_link_density(net, roles);
    for (Role a : kRoles) {
      for (Role b : kRoles) {
        const auto& c = d.at(a, b);
        if (c.ratio) CHECK(*c.ratio == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conservation and relabeling invariance") {
  synth::PopulationParams p;
  p.only_creators = 20;
  p.only_consumers = 80;
  p.mixed = 5;
  p.non_spreaders = 100;
  p.days = 10;
  const auto pop = synth::gen_population(p);
  const auto net = build_network(pop.log);
  CHECK(net.total_links == pop.log.size());
  const auto roles = node_roles(classify_static(pop.log, 0.2));
  for (NullModel null : {NullModel::UniformRandom, NullModel::Configuration}) {
    const auto d = group_link_density(net, roles, null);
    double obs = 0.0;
    double exp = 0.0;
    for (const auto& row : d.cells) {
      for (const auto& c : row) {
        obs += static_cast<double>(c.observed);
        exp += c.expected;
      }
    }
    CHECK(obs == static_cast<double>(net.total_links));
    CHECK(exp == doctest::Approx(static_cast<double>(net.total_links)));
  }

  // Permute ids.
  std::vector<UserId> perm(net.node_count);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(6);
  rng.shuffle(std::span<UserId>(perm));
  RetweetNetwork relabeled = net;
  for (auto& e : relabeled.edges) e = {perm[e.from], perm[e.to], e.multiplicity};
  std::sort(relabeled.edges.begin(), relabeled.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
  std::vector<Role> moved(roles.size());
  for (std::size_t u = 0; u < roles.size(); ++u) moved[perm[u]] = roles[u];
  const auto a = group_link_density(net, roles);
  const auto b = group_link_density(relabeled, moved);
  for (Role x : kRoles) {
    for (Role y : kRoles) {
      CHECK(a.at(x, y).observed == b.at(x, y).observed);
      CHECK(a.at(x, y).expected == b.at(x, y).expected);
    }
  }

}

TEST_CASE("planted consumer to creator preference tops the matrix") {
  // Needs enough users that the activity tail does not dominate a row.
  synth::PopulationParams p;
  p.only_creators = 130;
  p.only_consumers = 820;
  p.mixed = 47;
  p.non_spreaders = 1000;
  p.days = 30;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    p.seed = seed;
    const auto pop = synth::gen_population(p);
    const auto d = group_link_density(build_network(pop.log), node_roles(classify_static(pop.log, 0.2)));
    const auto& top = d.at(Role::Consumer, Role::Creator);
    for (Role x : kRoles) {
      for (Role y : kRoles) {
        if (d.at(x, y).ratio) CHECK(*d.at(x, y).ratio <= *top.ratio);
      }
    }
  }
}

TEST_CASE("empty group gives undefined ratio") {
  LogMaker m;
  m.share("a", "b");
  const auto net = build_network(m.finish());
  const std::vector<Role> roles(2, Role::NonSpreader);
  const auto d = group_link_density(net, roles);
  CHECK_FALSE(d.at(Role::Creator, Role::Consumer).ratio);
  CHECK(d.at(Role::NonSpreader, Role::NonSpreader).ratio);
}

TEST_CASE("curve csv") {
  LogMaker m;
  m.share("a", "b", 3);
  m.share("b", "a", 1);
  std::ostringstream out;
  write_curves_csv(out, {concentration_curve(m.finish(), CategoryFilter::all())});
  CHECK(out.str() == "user_share,content_share,category\n0.5,0.75,all\n1,1,all\n");
}
