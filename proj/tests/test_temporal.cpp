#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "infodemic/classification.hpp"
#include "infodemic/error.hpp"
#include "infodemic/rng.hpp"
#include "infodemic/synthgen.hpp"
#include "infodemic/temporal.hpp"

using namespace infodemic;

namespace {

const double kNaN = std::nan("");

// Random daily assignment: each user-day is absent, or holds a role.
RoleAssignment random_assignment(Rng& rng, std::size_t users, int days, double presence) {
  RoleAssignment a;
  a.user_count = users;
  a.window_count = days;
  for (std::size_t u = 0; u < users; ++u) {
    for (int d = 0; d < days; ++d) {
      if (!rng.bernoulli(presence)) continue;
      a.cells.push_back({static_cast<UserId>(u), d, kRoles[rng.index(3)], 1, 0});
    }
  }
  return a;
}

std::vector<ReturnRecord> returns_oracle(const RoleAssignment& a) {
  std::map<UserId, std::vector<std::pair<int, Role>>> days;
  for (const auto& c : a.cells) {
    if (is_spreader(c.role)) days[c.user].push_back({c.window, c.role});
  }
  std::vector<ReturnRecord> out;
  for (auto& [user, v] : days) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) {
      out.push_back({user, v[i - 1].second, v[i].second, v[i].first - v[i - 1].first - 1, v[i - 1].first});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("daily series arithmetic") {
  EventLogBuilder b;
  const UserId u = b.user("u");
  const UserId v = b.user("v");
  const std::int64_t day0 = 18283 * kSecondsPerDay;
  for (int i = 0; i < 10; ++i) {
    ShareEvent e;
    e.timestamp = day0 + i;
    e.actor = i < 5 ? u : v;
    e.source = i < 5 ? v : u;
    e.category = (i == 0 || i == 1 || i == 5 || i == 9) ? ContentCategory::Clickbait : ContentCategory::Science;
    b.add(e);
  }
  ShareEvent late;
  late.timestamp = day0 + 2 * kSecondsPerDay;
  late.actor = u;
  late.source = v;
  b.add(late);
  const auto log = std::move(b).finish();
  const auto s = daily_series(log, classify_window(log, {}));
  REQUIRE(s.size() == 3);
  CHECK(s.fake_fraction[0] == doctest::Approx(0.4));
  CHECK(s.creator_fraction[0] == doctest::Approx(1.0));  // 2/5 and 2/5
  CHECK(s.missing[1]);
  CHECK(std::isnan(s.fake_fraction[1]));
  CHECK(s.fake_fraction[2] == 0.0);
  CHECK(s.consumer_fraction[2] == 0.0);

  std::ostringstream out;
  write_series_csv(out, s);
  std::istringstream in(out.str());
  const auto back = read_series_csv(in);
  CHECK(back.missing == s.missing);
  CHECK(back.fake_fraction[0] == s.fake_fraction[0]);
}

TEST_CASE("daily series equals a brute-force count") {
  synth::PopulationParams p;
  p.only_creators = 20;
  p.only_consumers = 60;
  p.mixed = 5;
  p.non_spreaders = 60;
  p.days = 15;
  p.seed = 9;
  const auto pop = synth::gen_population(p);
  const auto assign = classify_window(pop.log, {});
  const auto s = daily_series(pop.log, assign);
  for (std::size_t d = 0; d < s.size(); ++d) {
    std::map<UserId, std::pair<int, int>> per_user;
    int shares = 0;
    int fake = 0;
    for (const auto& e : pop.log.events) {
      if (day_of(e.timestamp) - pop.log.origin_day() != static_cast<std::int64_t>(d)) continue;
      ++shares;
      fake += is_fake(e.category);
      auto& [t, f] = per_user[e.actor];
      ++t;
      f += is_fake(e.category);
    }
    if (shares == 0) {
      CHECK(s.missing[d]);
      continue;
    }
    int creators = 0;
    int consumers = 0;
    for (const auto& [user, tf] : per_user) {
      const double frac = static_cast<double>(tf.second) / tf.first;
      creators += frac >= 0.2;
      consumers += frac > 0 && frac < 0.2;
    }
    CHECK(s.fake_fraction[d] == static_cast<double>(fake) / shares);
    CHECK(s.creator_fraction[d] == static_cast<double>(creators) / static_cast<double>(per_user.size()));
    CHECK(s.consumer_fraction[d] == static_cast<double>(consumers) / static_cast<double>(per_user.size()));
  }
}

TEST_CASE("moving average") {
  const Series ramp = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(moving_average(ramp, 1) == ramp);
  const auto m3 = moving_average(ramp, 3);
  for (std::size_t i = 1; i + 1 < ramp.size(); ++i) CHECK(m3[i] == doctest::Approx((ramp[i - 1] + ramp[i] + ramp[i + 1]) / 3));
  CHECK(m3[0] == doctest::Approx(1.5));
  for (double v : moving_average(Series(7, 0.25), 4)) CHECK(v == doctest::Approx(0.25));
  // Even width: half weights at both ends.
  CHECK(moving_average(ramp, 2)[4] == doctest::Approx((0.5 * 4 + 5 + 0.5 * 6) / 2));
  const auto gaps = moving_average(Series{1, kNaN, kNaN, kNaN, 5}, 3);
  CHECK(gaps[1] == 1.0);
  CHECK(std::isnan(gaps[2]));
  CHECK_THROWS_AS(moving_average(Series{kNaN, kNaN}, 3), Error);

  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Series s(40);
    for (auto& v : s) v = rng.bernoulli(0.2) ? kNaN : rng.uniform();
    for (int w : {2, 5, 10}) {
      auto fwd = moving_average(s, w);
      Series rev(s.rbegin(), s.rend());
      auto back = moving_average(rev, w);
      std::reverse(back.begin(), back.end());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::isnan(fwd[i])) {
          CHECK(std::isnan(back[i]));
        } else {
          CHECK(fwd[i] == doctest::Approx(back[i]));
        }
      }
    }
  }
}

TEST_CASE("rescale") {
  const auto r = minmax_rescale(Series{2, kNaN, 4, 3});
  CHECK(r[0] == 0.0);
  CHECK(std::isnan(r[1]));
  CHECK(r[2] == 1.0);
  CHECK(r[3] == 0.5);
}

TEST_CASE("cross correlation") {
  Rng rng(12);
  Series a(50);
  Series b(50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform();
    b[i] = a[i] + rng.normal() * 0.3;
  }
  CHECK(cross_correlation(a, a) == doctest::Approx(1.0));
  Series neg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) neg[i] = 3.0 - a[i];
  CHECK(cross_correlation(a, neg) == doctest::Approx(-1.0));
  const double r = cross_correlation(a, b);
  CHECK(cross_correlation(b, a) == doctest::Approx(r));
  Series scaled(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) scaled[i] = 7.0 * b[i] - 2.0;
  CHECK(cross_correlation(a, scaled) == doctest::Approx(r));
  a[3] = kNaN;
  CHECK(std::isfinite(cross_correlation(a, b)));
  CHECK_THROWS_AS(cross_correlation(Series(10, 1.0), b), Error);
  CHECK_THROWS_AS(cross_correlation(Series{1, 2}, Series{2, 1}), Error);
}

TEST_CASE("transitions") {
  RoleAssignment a;
  a.user_count = 2;
  a.window_count = 3;
  a.cells = {{0, 0, Role::Creator, 1, 1}, {0, 1, Role::Creator, 1, 1}, {1, 0, Role::Consumer, 9, 1}};
  const auto m = transition_counts(a);
  CHECK(m.counts[0][0] == 1);
  CHECK(m.counts[0][2] == 1);
  CHECK(m.counts[1][2] == 1);
  CHECK(m.counts[2][2] == 1);

  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = random_assignment(rng, 12, 9, 0.4);
    std::array<std::array<std::uint64_t, 3>, 3> expected{};
    std::map<UserId, std::vector<int>> state;
    for (const auto& c : r.cells) {
      auto& v = state[c.user];
      v.resize(9, 2);
      v[static_cast<std::size_t>(c.window)] = static_cast<int>(role_index(c.role));
    }
    for (const auto& [u, v] : state) {
      for (std::size_t d = 0; d + 1 < v.size(); ++d) ++expected[static_cast<std::size_t>(v[d])][static_cast<std::size_t>(v[d + 1])];
    }
    CHECK(transition_counts(r).counts == expected);
  }
}

TEST_CASE("worked return-time example") {
  // Creator, 3 silent, Consumer, Consumer, 1 silent, Creator, Creator.
  RoleAssignment a;
  a.user_count = 1;
  a.window_count = 9;
  a.cells = {{0, 0, Role::Creator, 1, 1},  {0, 2, Role::NonSpreader, 1, 0}, {0, 4, Role::Consumer, 10, 1},
             {0, 5, Role::Consumer, 10, 1}, {0, 7, Role::Creator, 1, 1},     {0, 8, Role::Creator, 1, 1}};
  const auto records = first_return_times(a);
  std::vector<int> gaps;
  for (const auto& r : records) gaps.push_back(r.gap);
  CHECK(gaps == std::vector<int>{3, 0, 1, 0});
  CHECK(records[0].to == Role::Consumer);

  RoleAssignment once;
  once.window_count = 3;
  once.cells = {{0, 1, Role::Consumer, 5, 1}};
  CHECK(first_return_times(once).empty());
}

TEST_CASE("returns match a brute-force scan") {
  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_assignment(rng, 20, 30, 0.3);
    const auto records = first_return_times(a);
    CHECK(records == returns_oracle(a));
    for (const auto& r : records) CHECK(r.gap >= 0);
  }
}

TEST_CASE("return probability") {
  std::vector<ReturnRecord> two = {{0, Role::Creator, Role::Creator, 1, 0}, {1, Role::Creator, Role::Consumer, 1, 0}};
  auto p = return_probability(two, default_gap_bins());
  CHECK(*p.stats[0][0].p_creator == 0.5);
  CHECK(*p.stats[0][0].p_consumer == 0.5);
  CHECK_FALSE(p.stats[0][1].p_creator);
  CHECK_FALSE(p.stats[1][0].p_creator);

  std::vector<ReturnRecord> same = {{0, Role::Creator, Role::Creator, 0, 0}, {0, Role::Creator, Role::Creator, 20, 1},
                                    {0, Role::Creator, Role::Creator, 99, 2}};
  p = return_probability(same, default_gap_bins());
  CHECK(*p.stats[0][0].p_creator == 1.0);
  CHECK(*p.stats[0][3].p_creator == 1.0);
  CHECK(p.uncovered == 1);

  const auto back = return_profile_from_json(return_profile_to_json(p));
  CHECK(back.bins == p.bins);
  CHECK(back.uncovered == 1);
  CHECK(back.stats[0][0].to_creator == 1);
}

TEST_CASE("planted long-gap odds are recovered") {
  // Consumers return as consumers 24 times more often than as creators.
  Rng rng(77);
  std::vector<ReturnRecord> records;
  for (int i = 0; i < 20000; ++i) {
    const auto gap = static_cast<std::int32_t>(18 + rng.index(28));
    records.push_back({0, Role::Consumer, rng.bernoulli(1.0 / 25.0) ? Role::Creator : Role::Consumer, gap, 0});
  }
  const auto p = return_probability(records, default_gap_bins());
  const auto& st = p.stats[1][3];
  const double odds = static_cast<double>(st.to_consumer) / static_cast<double>(st.to_creator);
  // Delta-method standard error of the log odds.
  const double se = std::sqrt(1.0 / static_cast<double>(st.to_consumer) + 1.0 / static_cast<double>(st.to_creator));
  CHECK(std::abs(std::log(odds) - std::log(24.0)) < 3 * se);
  CHECK(*st.p_creator + *st.p_consumer == doctest::Approx(1.0));
}

TEST_CASE("gap bins") {
  CHECK(parse_gap_bins("0-2,3-8,9-17,18-45") == default_gap_bins());
  CHECK(parse_gap_bins("5") == std::vector<GapBin>{{5, 5}});
  CHECK_THROWS_AS(parse_gap_bins("0-3,3-8"), Error);
  CHECK_THROWS_AS(parse_gap_bins("4-2"), Error);
  CHECK_THROWS_AS(parse_gap_bins(""), Error);
}
