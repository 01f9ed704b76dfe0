#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "infodemic/classification.hpp"
#include "infodemic/ingestion.hpp"

namespace infodemic::synth {

// Planted population. Each spreader has a fixed behavior (only-creator,
// only-consumer or mixed); per-day fake counts are constructed so every
// spreader day clears the classification threshold by `margin`.
struct PopulationParams {
  std::size_t only_creators = 1291;
  std::size_t only_consumers = 8242;
  std::size_t mixed = 467;
  std::size_t non_spreaders = 10000;
  std::int64_t days = 120;
  std::int64_t start = 1579651200;  // 2020-01-22T00:00:00Z

  double threshold = 0.20;
  double margin = 0.05;
  double creator_fake_share = 0.45;   // per-user mean, clamped to >= threshold + margin
  double consumer_fake_share = 0.08;  // clamped to (0, threshold - margin]
  double fake_share_jitter = 0.05;    // per-user spread around the means

  // Discrete power law on {1, 2, ...} scaling per-user activity.
  double activity_exponent = 2.1;
  std::int64_t max_activity = 500;
  std::int64_t min_daily_events = 5;
  double extra_events_per_activity = 2.0;
  std::int64_t max_daily_events = 400;

  // Probability that a spreader is active on exactly one day.
  double once_creators = 9.14 / 12.91;
  double once_consumers = 58328.0 / 88400.0;
  double mixed_creator_day_share = 0.4;
  std::int64_t max_active_days = 60;

  // Probability a share by a consumer / creator retweets a planted creator;
  // otherwise the source is uniform over all users.
  double consumer_to_creator = 0.6;
  double creator_to_creator = 0.25;

  // Daily activity modulation. Driver z_d in (-1, 1) from a logistic map;
  // consumer weight 1 + consumer_coupling * z_d, creator weight
  // 1 + creator_coupling * z_d + creator_noise * N(0,1).
  double consumer_coupling = 0.0;
  double creator_coupling = 0.0;
  double creator_noise = 0.0;
  double driver_growth = 3.9;

  double unlabeled_share = 0.5;  // of non-fake shares
  bool explicit_categories = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Population {
  EventLog log;
  RoleAssignment planted;  // 1-day windows, same ids as the log
  std::vector<double> driver;
};

Population gen_population(const PopulationParams& params);

// Domain table matching the hostnames the generator emits.
CategoryTable synthetic_category_table();

PopulationParams reference_mix_population(std::uint64_t seed);
// Consumers follow the driver tightly, creators loosely.
PopulationParams coupled_dynamics_population(std::uint64_t seed);

struct CoupledMapParams {
  double r_x = 3.5;
  double r_y = 3.8;
  double beta_xy = 0.32;  // effect of y on x
  double beta_yx = 0.0;   // effect of x on y
  std::size_t length = 1000;
  std::size_t burn_in = 300;
  double noise = 0.0;  // observation noise sd
  std::size_t lag = 0;
  std::uint64_t seed = 1;

  void validate() const;
  // x autonomous, y forced by x(t - lag).
  static CoupledMapParams lag_defaults();
};

struct SeriesPair {
  std::vector<double> x;
  std::vector<double> y;
};

// x' = x(r_x - r_x x - beta_xy y), y' = y(r_y - r_y y - beta_yx x).
SeriesPair gen_coupled_logistic(const CoupledMapParams& params);

// y_t = y_{t-1}(r_y - r_y y_{t-1} - beta_yx x_{t-lag}); x is an autonomous
// logistic map. Lagged CCM of "x causes y" peaks at td = lag.
SeriesPair gen_lag_coupled(const CoupledMapParams& params);

using KeyValues = std::map<std::string, std::string>;
// Unknown keys throw InvalidParams.
void apply_config(PopulationParams& params, const KeyValues& kv);
void apply_config(CoupledMapParams& params, const KeyValues& kv);

}  // namespace infodemic::synth
