#include "infodemic/ccm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "infodemic/error.hpp"
#include "infodemic/rng.hpp"

namespace infodemic::ccm {

namespace {

void check_embedding(EmbeddingConfig cfg) {
  if (cfg.dimension < 1) fail(ErrorKind::InvalidArgument, "embedding dimension must be >= 1");
  if (cfg.tau < 1) fail(ErrorKind::InvalidArgument, "tau must be >= 1");
}

std::size_t span_of(EmbeddingConfig cfg) {
  return static_cast<std::size_t>(cfg.dimension - 1) * static_cast<std::size_t>(cfg.tau);
}

void check_finite(std::span<const double> series, const char* what) {
  for (double v : series) {
    if (!std::isfinite(v)) fail(ErrorKind::MissingValues, what);
  }
}

// Usable manifold times [lo, hi] for a given td; empty when lo > hi.
struct TimeRange {
  std::ptrdiff_t lo = 0;
  std::ptrdiff_t hi = -1;
  std::size_t count() const { return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1); }
};

TimeRange usable_range(std::size_t length, EmbeddingConfig cfg, int td) {
  const auto n = static_cast<std::ptrdiff_t>(length);
  const auto t0 = static_cast<std::ptrdiff_t>(span_of(cfg));
  return {std::max<std::ptrdiff_t>(t0, -td), std::min<std::ptrdiff_t>(n - 1, n - 1 - td)};
}

struct Neighbor {
  double dist2;
  std::size_t time;
};

// k nearest library points to `query` with strict improvement only, so equal
// distances keep the earlier library time (library is time-sorted).
void nearest(const ShadowManifold& m, std::size_t query_index, std::span<const std::size_t> library, int k,
             std::vector<Neighbor>& best) {
  best.clear();
  const std::size_t e = static_cast<std::size_t>(m.dimension());
  const auto q = m.point(query_index);
  const std::size_t query_time = m.time_of(query_index);
  for (const std::size_t t : library) {
    if (t == query_time) continue;
    const auto p = m.point(t - m.first_time());
    double d2 = 0.0;
    for (std::size_t j = 0; j < e; ++j) {
      const double diff = p[j] - q[j];
      d2 += diff * diff;
    }
    if (best.size() == static_cast<std::size_t>(k) && !(d2 < best.back().dist2)) continue;
    if (best.size() < static_cast<std::size_t>(k)) best.push_back({d2, t});
    std::size_t pos = best.size() - 1;
    while (pos > 0 && d2 < best[pos - 1].dist2) {
      best[pos] = best[pos - 1];
      --pos;
    }
    best[pos] = {d2, t};
  }
}

std::vector<std::size_t> pick_library(const TimeRange& range, std::size_t library_size, const CcmConfig& cfg,
                                      int td) {
  std::vector<std::size_t> lib;
  if (cfg.sampling == LibrarySampling::Sequential) {
    lib.resize(library_size);
    std::iota(lib.begin(), lib.end(), static_cast<std::size_t>(range.lo));
    return lib;
  }
  std::vector<std::size_t> all(range.count());
  std::iota(all.begin(), all.end(), static_cast<std::size_t>(range.lo));
  Rng rng(derive_seed(cfg.seed, {0x11b, library_size, static_cast<std::uint64_t>(static_cast<std::int64_t>(td))}));
  // Partial Fisher-Yates: first library_size slots become the sample.
  for (std::size_t i = 0; i < library_size; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(all.size() - i));
    std::swap(all[i], all[j]);
  }
  lib.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(library_size));
  std::sort(lib.begin(), lib.end());
  return lib;
}

std::size_t analysis_library(const CcmConfig& cfg, std::size_t length, std::span<const int> tds) {
  const std::size_t common = max_common_library(length, cfg.embedding, tds);
  if (cfg.library_sizes.empty()) return common;
  const std::size_t wanted = cfg.library_sizes.back();
  if (wanted > common) {
    fail(ErrorKind::InvalidArgument,
         "library size " + std::to_string(wanted) + " exceeds the " + std::to_string(common) + " usable points");
  }
  return wanted;
}

}  // namespace

ShadowManifold::ShadowManifold(EmbeddingConfig cfg, std::size_t first_time, std::vector<double> coords)
    : cfg_(cfg), first_time_(first_time), coords_(std::move(coords)) {}

ShadowManifold delay_embed(std::span<const double> series, EmbeddingConfig cfg) {
  check_embedding(cfg);
  const std::size_t offset = span_of(cfg);
  // A single point has no neighbor to map from, so ask for two.
  if (series.size() <= offset + 1) {
    fail(ErrorKind::SeriesTooShort, "length " + std::to_string(series.size()) + " needs more than " +
                                        std::to_string(offset + 1) + " samples");
  }
  check_finite(series, "series contains missing values");
  const auto e = static_cast<std::size_t>(cfg.dimension);
  const auto tau = static_cast<std::size_t>(cfg.tau);
  const std::size_t count = series.size() - offset;
  std::vector<double> coords(count * e);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t t = offset + i;
    for (std::size_t j = 0; j < e; ++j) coords[i * e + j] = series[t - j * tau];
  }
  return ShadowManifold(cfg, offset, std::move(coords));
}

std::size_t usable_points(std::size_t length, EmbeddingConfig cfg, int td) {
  return usable_range(length, cfg, td).count();
}

std::vector<double> simplex_weights(std::span<const double> distances) {
  std::vector<double> w(distances.size(), 0.0);
  if (distances.empty()) return w;
  const double d_min = *std::min_element(distances.begin(), distances.end());
  if (d_min > 0.0) {
    for (std::size_t i = 0; i < distances.size(); ++i) w[i] = std::exp(-distances[i] / d_min);
  } else {
    double eps = std::numeric_limits<double>::infinity();
    for (double d : distances) {
      if (d > 0.0) eps = std::min(eps, d);
    }
    for (std::size_t i = 0; i < distances.size(); ++i) {
      w[i] = distances[i] > 0.0 ? std::exp(-distances[i] / eps) : 1.0;
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorKind::InvalidArgument, "pearson needs equal non-empty inputs");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

CrossMapResult cross_map(std::span<const double> source, std::span<const double> target, const CcmConfig& cfg,
                         std::size_t library_size, int td) {
  if (source.size() != target.size()) fail(ErrorKind::InvalidArgument, "source and target lengths differ");
  check_finite(target, "target contains missing values");
  const ShadowManifold manifold = delay_embed(source, cfg.embedding);
  const int k = cfg.k();
  const TimeRange range = usable_range(source.size(), cfg.embedding, td);
  if (library_size < static_cast<std::size_t>(k) + 1) {
    fail(ErrorKind::InvalidArgument, "library size " + std::to_string(library_size) + " below k+1=" +
                                         std::to_string(k + 1));
  }
  if (library_size > range.count()) {
    fail(ErrorKind::InvalidArgument, "library size " + std::to_string(library_size) + " exceeds " +
                                         std::to_string(range.count()) + " usable points at td=" +
                                         std::to_string(td));
  }
  const auto library = pick_library(range, library_size, cfg, td);

  CrossMapResult out;
  out.times.reserve(range.count());
  out.observed.reserve(range.count());
  out.estimated.reserve(range.count());
  std::vector<Neighbor> best;
  best.reserve(static_cast<std::size_t>(k));
  std::vector<double> dist(static_cast<std::size_t>(k));
  for (auto t = static_cast<std::size_t>(range.lo); t <= static_cast<std::size_t>(range.hi); ++t) {
    nearest(manifold, t - manifold.first_time(), library, k, best);
    dist.resize(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) dist[i] = std::sqrt(best[i].dist2);
    const auto w = simplex_weights(dist);
    double estimate = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) {
      estimate += w[i] * target[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(best[i].time) + td)];
    }
    out.times.push_back(t);
    out.observed.push_back(target[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t) + td)]);
    out.estimated.push_back(estimate);
  }
  const auto [lo, hi] = std::minmax_element(out.observed.begin(), out.observed.end());
  if (*lo == *hi) fail(ErrorKind::DegenerateTarget, "observed targets are constant");
  out.rho = pearson(out.observed, out.estimated);
  return out;
}

ConvergenceProfile convergence_profile(std::span<const double> source, std::span<const double> target,
                                       const CcmConfig& cfg, int td) {
  if (cfg.library_sizes.size() < 2) fail(ErrorKind::InvalidArgument, "convergence needs >= 2 library sizes");
  if (!std::is_sorted(cfg.library_sizes.begin(), cfg.library_sizes.end())) {
    fail(ErrorKind::InvalidArgument, "library sizes must increase");
  }
  ConvergenceProfile p;
  p.library_sizes = cfg.library_sizes;
  for (std::size_t l : cfg.library_sizes) p.rho.push_back(cross_map(source, target, cfg, l, td).rho);
  p.trend = p.rho.back() - p.rho.front();
  double concordance = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    for (std::size_t j = i + 1; j < p.rho.size(); ++j) {
      const double dl = static_cast<double>(p.library_sizes[j]) - static_cast<double>(p.library_sizes[i]);
      const double dr = p.rho[j] - p.rho[i];
      concordance += static_cast<double>((dl > 0) - (dl < 0)) * static_cast<double>((dr > 0) - (dr < 0));
      ++pairs;
    }
  }
  p.kendall_tau = concordance / static_cast<double>(pairs);
  p.converging = p.trend > kConvergenceThreshold;
  return p;
}

std::string_view direction_name(Direction d) {
  return d == Direction::XCausesY ? "x_causes_y" : "y_causes_x";
}

std::size_t max_common_library(std::size_t length, EmbeddingConfig cfg, std::span<const int> tds) {
  check_embedding(cfg);
  if (tds.empty()) return usable_points(length, cfg, 0);
  std::size_t common = std::numeric_limits<std::size_t>::max();
  for (int td : tds) common = std::min(common, usable_points(length, cfg, td));
  return common;
}

double directed_rho(std::span<const double> x, std::span<const double> y, Direction dir, const CcmConfig& cfg,
                    std::size_t library_size, int td) {
  // The effect's manifold recovers the cause as it was td samples earlier.
  if (dir == Direction::XCausesY) return cross_map(y, x, cfg, library_size, -td).rho;
  return cross_map(x, y, cfg, library_size, -td).rho;
}

LaggedCcm lagged_ccm(std::span<const double> x, std::span<const double> y, const CcmConfig& cfg) {
  if (cfg.time_delays.empty()) fail(ErrorKind::InvalidArgument, "no time delays");
  if (x.size() != y.size()) fail(ErrorKind::InvalidArgument, "series lengths differ");
  LaggedCcm out;
  out.library_size = analysis_library(cfg, x.size(), cfg.time_delays);
  for (Direction dir : {Direction::XCausesY, Direction::YCausesX}) {
    LaggedCurve& curve = dir == Direction::XCausesY ? out.x_causes_y : out.y_causes_x;
    curve.direction = dir;
    curve.time_delays = cfg.time_delays;
    for (int td : cfg.time_delays) curve.rho.push_back(directed_rho(x, y, dir, cfg, out.library_size, td));
    const auto peak = std::max_element(curve.rho.begin(), curve.rho.end());
    curve.peak_td = curve.time_delays[static_cast<std::size_t>(peak - curve.rho.begin())];
  }
  return out;
}

double percentile95(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "percentile of empty set");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

CcmResult surrogate_test(std::span<const double> x, std::span<const double> y, const CcmConfig& cfg,
                         Direction dir, unsigned threads) {
  if (cfg.surrogates < 1) fail(ErrorKind::InvalidArgument, "surrogate count must be positive");
  if (cfg.time_delays.empty()) fail(ErrorKind::InvalidArgument, "no time delays");
  if (x.size() != y.size()) fail(ErrorKind::InvalidArgument, "series lengths differ");
  CcmResult result;
  result.embedding = cfg.embedding;
  result.neighbors = cfg.k();
  result.surrogates = cfg.surrogates;
  result.seed = cfg.seed;
  const std::size_t library = analysis_library(cfg, x.size(), cfg.time_delays);
  const std::span<const double> manifold_series = dir == Direction::XCausesY ? y : x;
  const std::span<const double> other = dir == Direction::XCausesY ? x : y;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto reps = static_cast<std::size_t>(cfg.surrogates);
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));

  for (int td : cfg.time_delays) {
    SurrogateRow row;
    row.direction = dir;
    row.td = td;
    row.library_size = library;
    row.rho = cross_map(manifold_series, other, cfg, library, -td).rho;
    row.surrogate_rho.assign(reps, 0.0);

    auto work = [&](std::size_t begin, std::size_t stride) {
      std::vector<double> shuffled(manifold_series.begin(), manifold_series.end());
      for (std::size_t r = begin; r < reps; r += stride) {
        std::copy(manifold_series.begin(), manifold_series.end(), shuffled.begin());
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(dir), static_cast<std::uint64_t>(
                                                                            static_cast<std::int64_t>(td)),
                                       library, r}));
        rng.shuffle(std::span<double>(shuffled));
        row.surrogate_rho[r] = cross_map(shuffled, other, cfg, library, -td).rho;
      }
    };
    if (threads <= 1) {
      work(0, 1);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
          pool.emplace_back([&, w] {
            try {
              work(w, threads);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    row.p95 = percentile95(row.surrogate_rho);
    row.significant = row.rho > row.p95;
    result.rows.push_back(std::move(row));
  }
  return result;
}

EmbeddingSelection select_embedding(std::span<const double> series, int max_dimension, int tau) {
  if (max_dimension < 1) fail(ErrorKind::InvalidArgument, "max dimension must be >= 1");
  EmbeddingSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (int e = 1; e <= max_dimension; ++e) {
    CcmConfig cfg;
    cfg.embedding = {e, tau};
    const std::size_t usable = usable_points(series.size(), cfg.embedding, 1);
    if (usable < static_cast<std::size_t>(cfg.k()) + 1) break;
    const double skill = cross_map(series, series, cfg, usable, 1).rho;
    sel.skill.push_back(skill);
    if (skill > best) {
      best = skill;
      sel.best_dimension = e;
    }
  }
  if (sel.skill.empty()) fail(ErrorKind::SeriesTooShort, "series too short for embedding selection");
  return sel;
}

std::vector<std::size_t> geometric_library_sizes(std::size_t min_size, std::size_t available) {
  if (min_size == 0 || min_size > available) {
    fail(ErrorKind::InvalidArgument, "library ladder needs 0 < min <= available");
  }
  std::vector<std::size_t> out;
  for (std::size_t s = min_size; s < available; s *= 2) out.push_back(s);
  out.push_back(available);
  return out;
}

std::size_t interpolate_missing(std::vector<double>& series) {
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!std::isnan(series[i])) known.push_back(i);
  }
  if (known.empty()) fail(ErrorKind::AllMissing, "nothing to interpolate from");
  std::size_t filled = 0;
  for (std::size_t i = 0; i < known.front(); ++i, ++filled) series[i] = series[known.front()];
  for (std::size_t i = known.back() + 1; i < series.size(); ++i, ++filled) series[i] = series[known.back()];
  for (std::size_t k = 0; k + 1 < known.size(); ++k) {
    const std::size_t a = known[k];
    const std::size_t b = known[k + 1];
    for (std::size_t i = a + 1; i < b; ++i, ++filled) {
      const double f = static_cast<double>(i - a) / static_cast<double>(b - a);
      series[i] = series[a] + f * (series[b] - series[a]);
    }
  }
  return filled;
}

}  // namespace infodemic::ccm
