#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic::ccm {

struct EmbeddingConfig {
  int dimension = 2;  // E
  int tau = 1;

  bool operator==(const EmbeddingConfig&) const = default;
};

// Delay-coordinate reconstruction. Point i sits at time t = first_time + i and
// holds (x_t, x_{t-tau}, ..., x_{t-(E-1)tau}).
class ShadowManifold {
 public:
  ShadowManifold(EmbeddingConfig cfg, std::size_t first_time, std::vector<double> coords);

  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(cfg_.dimension); }
  int dimension() const noexcept { return cfg_.dimension; }
  const EmbeddingConfig& config() const noexcept { return cfg_; }
  std::size_t first_time() const noexcept { return first_time_; }
  std::size_t time_of(std::size_t i) const noexcept { return first_time_ + i; }

  std::span<const double> point(std::size_t i) const noexcept {
    const auto e = static_cast<std::size_t>(cfg_.dimension);
    return {coords_.data() + i * e, e};
  }

 private:
  EmbeddingConfig cfg_;
  std::size_t first_time_;
  std::vector<double> coords_;
};

// Throws SeriesTooShort unless at least two points result, MissingValues on NaN.
ShadowManifold delay_embed(std::span<const double> series, EmbeddingConfig cfg);

enum class LibrarySampling {
  Sequential,  // first L usable points
  Random,      // L usable points drawn without replacement, seeded
};

struct CcmConfig {
  EmbeddingConfig embedding;
  std::vector<std::size_t> library_sizes;  // increasing
  std::vector<int> time_delays{0};
  int neighbors = 0;  // 0 means E + 1
  int surrogates = 1000;
  std::uint64_t seed = 0;
  LibrarySampling sampling = LibrarySampling::Sequential;

  int k() const noexcept { return neighbors > 0 ? neighbors : embedding.dimension + 1; }
};

// Manifold points whose target index t + td stays inside the series.
std::size_t usable_points(std::size_t length, EmbeddingConfig cfg, int td);

// Simplex weights for sorted neighbor distances: exp(-d/d_min), normalized.
// With zero distances present, zero-distance neighbors share weight 1 and the
// rest use the smallest positive distance as scale.
std::vector<double> simplex_weights(std::span<const double> distances);

struct CrossMapResult {
  std::vector<std::size_t> times;  // manifold time t of each prediction
  std::vector<double> observed;    // target[t + td]
  std::vector<double> estimated;
  double rho = 0.0;
};

// Estimates target(t + td) from the source's shadow manifold at every usable
// t, using the k nearest library neighbors (the point itself excluded).
// High rho is evidence that the target drives the source.
CrossMapResult cross_map(std::span<const double> source, std::span<const double> target, const CcmConfig& cfg,
                         std::size_t library_size, int td);

// Pearson correlation; 0 when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

struct ConvergenceProfile {
  std::vector<std::size_t> library_sizes;
  std::vector<double> rho;
  double trend = 0.0;        // rho at the largest library minus rho at the smallest
  double kendall_tau = 0.0;  // rank agreement between library size and rho
  bool converging = false;   // trend > kConvergenceThreshold
};

inline constexpr double kConvergenceThreshold = 0.1;

ConvergenceProfile convergence_profile(std::span<const double> source, std::span<const double> target,
                                       const CcmConfig& cfg, int td = 0);

// Causal direction under test. XCausesY cross-maps from Y's manifold to X.
enum class Direction { XCausesY, YCausesX };

std::string_view direction_name(Direction d);

// Positive td means the putative cause leads the effect by td samples: the
// effect manifold at t estimates cause(t - td).
struct LaggedCurve {
  Direction direction = Direction::XCausesY;
  std::vector<int> time_delays;
  std::vector<double> rho;
  int peak_td = 0;
};

struct LaggedCcm {
  std::size_t library_size = 0;  // common to every td
  LaggedCurve x_causes_y;
  LaggedCurve y_causes_x;
};

// Library size per td is the largest one every td in the list supports.
std::size_t max_common_library(std::size_t length, EmbeddingConfig cfg, std::span<const int> tds);

double directed_rho(std::span<const double> x, std::span<const double> y, Direction dir, const CcmConfig& cfg,
                    std::size_t library_size, int td);

LaggedCcm lagged_ccm(std::span<const double> x, std::span<const double> y, const CcmConfig& cfg);

struct SurrogateRow {
  Direction direction = Direction::XCausesY;
  int td = 0;
  std::size_t library_size = 0;
  double rho = 0.0;
  std::vector<double> surrogate_rho;
  double p95 = 0.0;
  bool significant = false;
};

struct CcmResult {
  EmbeddingConfig embedding;
  int neighbors = 0;
  int surrogates = 0;
  std::uint64_t seed = 0;
  std::vector<SurrogateRow> rows;
};

// 95th percentile by nearest rank: the ceil(0.95 n)-th smallest value.
double percentile95(std::vector<double> values);

// For each td: rho at the common maximum library, and `cfg.surrogates`
// replicates with the manifold (effect-side) series randomly permuted.
// Significant when rho exceeds the surrogate 95th percentile. Replicates run
// on up to `threads` workers (0 = hardware concurrency); results depend only
// on the seed.
CcmResult surrogate_test(std::span<const double> x, std::span<const double> y, const CcmConfig& cfg,
                         Direction dir, unsigned threads = 0);

struct EmbeddingSelection {
  int best_dimension = 1;
  std::vector<double> skill;  // index E-1
};

// Leave-one-out simplex forecast (one step ahead) skill for E = 1..max_dimension.
EmbeddingSelection select_embedding(std::span<const double> series, int max_dimension = 10, int tau = 1);

// 4E, doubling, up to `available` (always included).
std::vector<std::size_t> geometric_library_sizes(std::size_t min_size, std::size_t available);

// Linear interpolation over NaN gaps; leading/trailing gaps take the nearest
// value. Returns the number of filled points. Throws AllMissing.
std::size_t interpolate_missing(std::vector<double>& series);

}  // namespace infodemic::ccm
