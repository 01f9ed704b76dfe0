#include "infodemic/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "infodemic/error.hpp"
#include "infodemic/rng.hpp"

namespace infodemic::synth {

namespace {

enum class Behavior { OnlyCreator, OnlyConsumer, Mixed, NonSpreader };

constexpr ContentCategory kFakeCategories[] = {ContentCategory::Clickbait, ContentCategory::FakeHoax,
                                               ContentCategory::ConspiracyJunkScience};
constexpr ContentCategory kRealCategories[] = {ContentCategory::Science, ContentCategory::MainstreamMedia,
                                               ContentCategory::Satire, ContentCategory::Political};
constexpr int kDomainsPerCategory = 5;

std::string host_for(ContentCategory c, int j) {
  std::string slug;
  for (char ch : category_name(c)) slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return slug + "-" + std::to_string(j) + ".example";
}

// P(a >= k) ~ k^-(exponent - 1) on {1, 2, ...}, truncated at max_value.
std::int64_t power_law(Rng& rng, double exponent, std::int64_t max_value) {
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  const double v = std::floor(std::pow(u, -1.0 / (exponent - 1.0)));
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::min(v, 1e15)), 1, max_value);
}

// Weighted sampling of `count` distinct days without replacement
// (Efraimidis-Spirakis keys), returned in ascending order.
std::vector<std::int64_t> pick_days(Rng& rng, const std::vector<double>& weights, std::int64_t count) {
  std::vector<std::pair<double, std::int64_t>> keys(weights.size());
  for (std::size_t d = 0; d < weights.size(); ++d) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    keys[d] = {std::log(u) / weights[d], static_cast<std::int64_t>(d)};
  }
  const auto take = static_cast<std::size_t>(std::min<std::int64_t>(count, static_cast<std::int64_t>(keys.size())));
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(take), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::int64_t> days;
  for (std::size_t i = 0; i < take; ++i) days.push_back(keys[i].second);
  std::sort(days.begin(), days.end());
  return days;
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidParams, what);
}

}  // namespace

void PopulationParams::validate() const {
  check(days >= 1, "days must be >= 1");
  check(threshold > 0.0 && threshold <= 1.0, "threshold must be in (0,1]");
  check(margin >= 0.0 && threshold - margin > 0.0 && threshold + margin <= 1.0, "margin leaves no room");
  check(creator_fake_share >= 0.0 && creator_fake_share <= 1.0, "creator_fake_share must be a probability");
  check(consumer_fake_share > 0.0 && consumer_fake_share < threshold, "consumer_fake_share must be in (0, threshold)");
  check(fake_share_jitter >= 0.0, "fake_share_jitter must be >= 0");
  check(activity_exponent > 1.0, "activity_exponent must exceed 1");
  check(max_activity >= 1 && min_daily_events >= 1 && max_daily_events >= min_daily_events,
        "daily event bounds inconsistent");
  check(extra_events_per_activity >= 0.0, "extra_events_per_activity must be >= 0");
  for (double p : {once_creators, once_consumers, mixed_creator_day_share, consumer_to_creator, creator_to_creator,
                   unlabeled_share}) {
    check(p >= 0.0 && p <= 1.0, "probabilities must be in [0,1]");
  }
  check(max_active_days >= 1, "max_active_days must be >= 1");
  check(mixed == 0 || (days >= 2 && max_active_days >= 2), "mixed users need at least 2 active days");
  check(creator_noise >= 0.0, "creator_noise must be >= 0");
  check(driver_growth > 0.0 && driver_growth <= 4.0, "driver_growth must be in (0,4]");
  const std::size_t users = only_creators + only_consumers + mixed + non_spreaders;
  check(users >= 2, "need at least 2 users");
  check(users < 0xffffffffULL, "too many users");
}

Population gen_population(const PopulationParams& p) {
  p.validate();
  Population out;
  const auto days = static_cast<std::size_t>(p.days);

  // Driver and per-day selection weights.
  {
    Rng rng(derive_seed(p.seed, {0xd41}));
    double x = 0.1 + 0.8 * rng.uniform();
    for (int i = 0; i < 100; ++i) x = p.driver_growth * x * (1.0 - x);
    for (std::size_t d = 0; d < days; ++d) {
      out.driver.push_back(2.0 * x - 1.0);
      x = p.driver_growth * x * (1.0 - x);
    }
  }
  std::vector<double> consumer_w(days);
  std::vector<double> creator_w(days);
  std::vector<double> flat_w(days, 1.0);
  {
    Rng rng(derive_seed(p.seed, {0xd42}));
    for (std::size_t d = 0; d < days; ++d) {
      consumer_w[d] = std::max(0.02, 1.0 + p.consumer_coupling * out.driver[d]);
      creator_w[d] = std::max(0.02, 1.0 + p.creator_coupling * out.driver[d] + p.creator_noise * rng.normal());
    }
  }

  const std::size_t n_users = p.only_creators + p.only_consumers + p.mixed + p.non_spreaders;
  EventLogBuilder builder;
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n_users).size());
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto digits = std::to_string(u);
    builder.user("u" + std::string(width - digits.size(), '0') + digits);
  }
  std::vector<DomainId> fake_domains;
  std::vector<DomainId> real_domains;
  std::vector<DomainId> misc_domains;
  for (auto c : kFakeCategories) {
    for (int j = 0; j < kDomainsPerCategory; ++j) fake_domains.push_back(builder.domain(host_for(c, j)));
  }
  for (auto c : kRealCategories) {
    for (int j = 0; j < kDomainsPerCategory; ++j) real_domains.push_back(builder.domain(host_for(c, j)));
  }
  for (int j = 0; j < kDomainsPerCategory; ++j) misc_domains.push_back(builder.domain("misc-" + std::to_string(j) + ".example"));

  auto behavior_of = [&](std::size_t u) {
    if (u < p.only_creators) return Behavior::OnlyCreator;
    u -= p.only_creators;
    if (u < p.only_consumers) return Behavior::OnlyConsumer;
    u -= p.only_consumers;
    if (u < p.mixed) return Behavior::Mixed;
    return Behavior::NonSpreader;
  };

  const double creator_floor = p.threshold + p.margin;
  const double consumer_ceiling = p.threshold - p.margin;
  const auto consumer_min_events = static_cast<std::int64_t>(std::ceil(1.0 / consumer_ceiling - 1e-9));
  const std::int64_t day_limit = std::min<std::int64_t>(p.max_active_days, p.days);

  out.planted.user_count = n_users;
  out.planted.window_count = static_cast<std::int32_t>(p.days);
  out.planted.window_days = 1;
  out.planted.origin_day = day_of(p.start);
  out.planted.threshold = p.threshold;

  for (std::size_t u = 0; u < n_users; ++u) {
    Rng rng(derive_seed(p.seed, {0x05e, u}));
    const Behavior behavior = behavior_of(u);
    const std::int64_t activity = power_law(rng, p.activity_exponent, p.max_activity);

    std::int64_t active_days = 0;
    const std::vector<double>* weights = &flat_w;
    switch (behavior) {
      case Behavior::OnlyCreator:
        active_days = rng.bernoulli(p.once_creators)
                          ? 1
                          : std::min(day_limit, 1 + power_law(rng, p.activity_exponent, p.max_activity));
        weights = &creator_w;
        break;
      case Behavior::OnlyConsumer:
        active_days = rng.bernoulli(p.once_consumers)
                          ? 1
                          : std::min(day_limit, 1 + power_law(rng, p.activity_exponent, p.max_activity));
        weights = &consumer_w;
        break;
      case Behavior::Mixed:
        active_days = std::min(day_limit, 1 + power_law(rng, p.activity_exponent, p.max_activity));
        weights = &consumer_w;
        break;
      case Behavior::NonSpreader:
        active_days = std::min(day_limit, power_law(rng, p.activity_exponent, p.max_activity));
        break;
    }
    const auto chosen = pick_days(rng, *weights, active_days);

    std::vector<Role> roles(chosen.size(), Role::NonSpreader);
    if (behavior == Behavior::OnlyCreator) std::fill(roles.begin(), roles.end(), Role::Creator);
    if (behavior == Behavior::OnlyConsumer) std::fill(roles.begin(), roles.end(), Role::Consumer);
    if (behavior == Behavior::Mixed) {
      for (auto& r : roles) r = rng.bernoulli(p.mixed_creator_day_share) ? Role::Creator : Role::Consumer;
      if (std::all_of(roles.begin(), roles.end(), [&](Role r) { return r == roles.front(); })) {
        const auto flip = static_cast<std::size_t>(rng.index(roles.size()));
        roles[flip] = roles[flip] == Role::Creator ? Role::Consumer : Role::Creator;
      }
    }

    const double creator_share =
        std::clamp(p.creator_fake_share + p.fake_share_jitter * rng.normal(), creator_floor, 1.0);
    const double consumer_share =
        std::clamp(p.consumer_fake_share + p.fake_share_jitter * rng.normal(), 1e-3, consumer_ceiling);
    const double extra_mean = p.extra_events_per_activity * static_cast<double>(activity - 1);

    for (std::size_t i = 0; i < chosen.size(); ++i) {
      const Role role = roles[i];
      std::int64_t n_min = role == Role::NonSpreader ? 1 : p.min_daily_events;
      if (role == Role::Consumer) n_min = std::max(n_min, consumer_min_events);
      const std::int64_t n =
          std::min(std::max(p.max_daily_events, n_min), n_min + static_cast<std::int64_t>(rng.poisson(extra_mean)));
      std::int64_t fake = 0;
      if (role == Role::Creator) {
        const auto lo = static_cast<std::int64_t>(std::ceil(creator_floor * static_cast<double>(n) - 1e-9));
        fake = std::clamp<std::int64_t>(std::llround(creator_share * static_cast<double>(n)), lo, n);
      } else if (role == Role::Consumer) {
        const auto hi = static_cast<std::int64_t>(std::floor(consumer_ceiling * static_cast<double>(n) + 1e-9));
        fake = std::clamp<std::int64_t>(std::llround(consumer_share * static_cast<double>(n)), 1, hi);
      }

      // Choose which of the n shares are fake: a random k-subset.
      std::vector<std::uint8_t> is_fake_share(static_cast<std::size_t>(n), 0);
      std::fill(is_fake_share.begin(), is_fake_share.begin() + fake, 1);
      rng.shuffle(std::span<std::uint8_t>(is_fake_share));

      // The first day may start mid-day when `start` is not at midnight.
      const std::int64_t midnight = (day_of(p.start) + chosen[i]) * kSecondsPerDay;
      const std::int64_t first_ts = std::max(p.start, midnight);
      const auto day_span = static_cast<std::uint64_t>(midnight + kSecondsPerDay - first_ts);
      for (std::int64_t j = 0; j < n; ++j) {
        ShareEvent e;
        e.timestamp = first_ts + static_cast<std::int64_t>(rng.index(day_span));
        e.actor = static_cast<UserId>(u);

        double to_creator = 0.0;
        if (behavior != Behavior::NonSpreader) {
          to_creator = role == Role::Creator ? p.creator_to_creator : p.consumer_to_creator;
        }
        do {
          if (p.only_creators > 0 && rng.bernoulli(to_creator)) {
            e.source = static_cast<UserId>(rng.index(p.only_creators));
          } else {
            e.source = static_cast<UserId>(rng.index(n_users));
          }
        } while (e.source == e.actor);

        if (is_fake_share[static_cast<std::size_t>(j)]) {
          const auto c = static_cast<std::size_t>(rng.index(std::size(kFakeCategories)));
          e.category = kFakeCategories[c];
          e.domain = fake_domains[c * kDomainsPerCategory + rng.index(kDomainsPerCategory)];
        } else if (rng.bernoulli(p.unlabeled_share)) {
          e.category = ContentCategory::Unlabeled;
          e.domain = rng.bernoulli(0.5) ? kNoDomain : misc_domains[rng.index(kDomainsPerCategory)];
        } else {
          const auto c = static_cast<std::size_t>(rng.index(std::size(kRealCategories)));
          e.category = kRealCategories[c];
          e.domain = real_domains[c * kDomainsPerCategory + rng.index(kDomainsPerCategory)];
        }
        e.kind = ShareKind::Retweet;
        if (p.explicit_categories) {
          e.category_pinned = e.category != ContentCategory::Unlabeled;
        } else {
          e.category = ContentCategory::Unlabeled;
        }
        builder.add(e);
      }
      out.planted.cells.push_back({static_cast<UserId>(u), static_cast<std::int32_t>(chosen[i]), role,
                                   static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(fake)});
    }
  }

  out.log = std::move(builder).finish();
  // The study window spans whole days even if the extreme days drew no shares.
  out.log.window = {p.start, (day_of(p.start) + p.days) * kSecondsPerDay - 1};
  return out;
}

CategoryTable synthetic_category_table() {
  CategoryTable t;
  for (auto c : kFakeCategories) {
    for (int j = 0; j < kDomainsPerCategory; ++j) t.entries.emplace(host_for(c, j), c);
  }
  for (auto c : kRealCategories) {
    for (int j = 0; j < kDomainsPerCategory; ++j) t.entries.emplace(host_for(c, j), c);
  }
  return t;
}

PopulationParams reference_mix_population(std::uint64_t seed) {
  PopulationParams p;
  // Proportions of the only-creator / only-consumer / mixed split.
  p.only_creators = 2582;
  p.only_consumers = 16484;
  p.mixed = 934;
  p.non_spreaders = 20000;
  p.seed = seed;
  return p;
}

PopulationParams coupled_dynamics_population(std::uint64_t seed) {
  PopulationParams p;
  p.seed = seed;
  // Few creators, so their daily fraction carries sampling noise that the
  // consumer-dominated fake volume does not. Flat event counts keep the heavy
  // activity tail from swamping the daily ratios.
  p.only_creators = 500;
  p.mixed = 200;
  p.consumer_coupling = 1.0;
  p.creator_coupling = 0.8;
  p.creator_noise = 0.3;
  p.extra_events_per_activity = 0.1;
  p.consumer_fake_share = 0.14;
  p.creator_fake_share = 0.3;
  return p;
}

void CoupledMapParams::validate() const {
  check(r_x > 0.0 && r_x <= 4.0 && r_y > 0.0 && r_y <= 4.0, "growth rates must be in (0,4]");
  check(beta_xy >= 0.0 && beta_yx >= 0.0, "coupling strengths must be >= 0");
  check(length >= 1, "length must be >= 1");
  check(burn_in >= 100, "burn_in must be >= 100");
  check(noise >= 0.0, "noise must be >= 0");
}

CoupledMapParams CoupledMapParams::lag_defaults() {
  CoupledMapParams p;
  p.r_x = 3.8;
  p.r_y = 3.5;
  p.beta_xy = 0.0;
  p.beta_yx = 0.32;
  return p;
}

namespace {

void check_state(double v, std::size_t t) {
  if (!(v > 0.0 && v < 1.0)) fail(ErrorKind::Diverged, "state left (0,1) at step " + std::to_string(t));
}

void add_noise(SeriesPair& s, double noise, std::uint64_t seed) {
  if (noise <= 0.0) return;
  Rng rng(derive_seed(seed, {0x401}));
  for (double& v : s.x) v += noise * rng.normal();
  for (double& v : s.y) v += noise * rng.normal();
}

}  // namespace

SeriesPair gen_coupled_logistic(const CoupledMapParams& p) {
  p.validate();
  Rng rng(derive_seed(p.seed, {0xc0}));
  double x = 0.1 + 0.8 * rng.uniform();
  double y = 0.1 + 0.8 * rng.uniform();
  SeriesPair out;
  out.x.reserve(p.length);
  out.y.reserve(p.length);
  for (std::size_t t = 0; t < p.burn_in + p.length; ++t) {
    const double nx = x * (p.r_x - p.r_x * x - p.beta_xy * y);
    const double ny = y * (p.r_y - p.r_y * y - p.beta_yx * x);
    x = nx;
    y = ny;
    check_state(x, t);
    check_state(y, t);
    if (t >= p.burn_in) {
      out.x.push_back(x);
      out.y.push_back(y);
    }
  }
  add_noise(out, p.noise, p.seed);
  return out;
}

SeriesPair gen_lag_coupled(const CoupledMapParams& p) {
  p.validate();
  if (p.lag >= p.length) fail(ErrorKind::InvalidParams, "lag must be shorter than the series");
  Rng rng(derive_seed(p.seed, {0x1a9}));
  const std::size_t total = p.burn_in + p.length + p.lag;
  std::vector<double> x(total);
  std::vector<double> y(total);
  x[0] = 0.1 + 0.8 * rng.uniform();
  y[0] = 0.1 + 0.8 * rng.uniform();
  for (std::size_t t = 1; t < total; ++t) {
    x[t] = x[t - 1] * (p.r_x - p.r_x * x[t - 1]);
    const double driver = t >= p.lag ? x[t - p.lag] : x[0];
    y[t] = y[t - 1] * (p.r_y - p.r_y * y[t - 1] - p.beta_yx * driver);
    check_state(x[t], t);
    check_state(y[t], t);
  }
  const auto first = static_cast<std::ptrdiff_t>(p.burn_in + p.lag);
  SeriesPair out{{x.begin() + first, x.end()}, {y.begin() + first, y.end()}};
  add_noise(out, p.noise, p.seed);
  return out;
}

namespace {

template <typename Params>
using Setter = std::function<void(Params&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidParams, key + " = " + v);
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidParams, key + " = " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::InvalidParams, key + " = " + v);
}

}  // namespace

void apply_config(PopulationParams& p, const KeyValues& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "only_creators") p.only_creators = to_uint(key, v);
    else if (key == "only_consumers") p.only_consumers = to_uint(key, v);
    else if (key == "mixed") p.mixed = to_uint(key, v);
    else if (key == "non_spreaders") p.non_spreaders = to_uint(key, v);
    else if (key == "days") p.days = static_cast<std::int64_t>(to_uint(key, v));
    else if (key == "start") p.start = static_cast<std::int64_t>(to_double(key, v));
    else if (key == "threshold") p.threshold = to_double(key, v);
    else if (key == "margin") p.margin = to_double(key, v);
    else if (key == "creator_fake_share") p.creator_fake_share = to_double(key, v);
    else if (key == "consumer_fake_share") p.consumer_fake_share = to_double(key, v);
    else if (key == "fake_share_jitter") p.fake_share_jitter = to_double(key, v);
    else if (key == "activity_exponent") p.activity_exponent = to_double(key, v);
    else if (key == "max_activity") p.max_activity = static_cast<std::int64_t>(to_uint(key, v));
    else if (key == "min_daily_events") p.min_daily_events = static_cast<std::int64_t>(to_uint(key, v));
    else if (key == "extra_events_per_activity") p.extra_events_per_activity = to_double(key, v);
    else if (key == "max_daily_events") p.max_daily_events = static_cast<std::int64_t>(to_uint(key, v));
    else if (key == "once_creators") p.once_creators = to_double(key, v);
    else if (key == "once_consumers") p.once_consumers = to_double(key, v);
    else if (key == "mixed_creator_day_share") p.mixed_creator_day_share = to_double(key, v);
    else if (key == "max_active_days") p.max_active_days = static_cast<std::int64_t>(to_uint(key, v));
    else if (key == "consumer_to_creator") p.consumer_to_creator = to_double(key, v);
    else if (key == "creator_to_creator") p.creator_to_creator = to_double(key, v);
    else if (key == "consumer_coupling") p.consumer_coupling = to_double(key, v);
    else if (key == "creator_coupling") p.creator_coupling = to_double(key, v);
    else if (key == "creator_noise") p.creator_noise = to_double(key, v);
    else if (key == "driver_growth") p.driver_growth = to_double(key, v);
    else if (key == "unlabeled_share") p.unlabeled_share = to_double(key, v);
    else if (key == "explicit_categories") p.explicit_categories = to_bool(key, v);
    else if (key == "seed") p.seed = to_uint(key, v);
    else fail(ErrorKind::InvalidParams, "unknown population key " + key);
  }
}

void apply_config(CoupledMapParams& p, const KeyValues& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "r_x") p.r_x = to_double(key, v);
    else if (key == "r_y") p.r_y = to_double(key, v);
    else if (key == "beta_xy") p.beta_xy = to_double(key, v);
    else if (key == "beta_yx") p.beta_yx = to_double(key, v);
    else if (key == "length") p.length = to_uint(key, v);
    else if (key == "burn_in") p.burn_in = to_uint(key, v);
    else if (key == "noise") p.noise = to_double(key, v);
    else if (key == "lag") p.lag = to_uint(key, v);
    else if (key == "seed") p.seed = to_uint(key, v);
    else fail(ErrorKind::InvalidParams, "unknown coupled-map key " + key);
  }
}

}  // namespace infodemic::synth
