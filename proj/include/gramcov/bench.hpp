#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/matrix.hpp"
#include "gramcov/rng.hpp"

namespace gramcov {

enum class Method { bariance, centered, external_baseline };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::bariance:
      return "bariance";
    case Method::centered:
      return "centered";
    case Method::external_baseline:
      return "external-baseline";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "bariance") return Method::bariance;
  if (name == "centered") return Method::centered;
  if (name == "external-baseline") return Method::external_baseline;
  return std::nullopt;
}

/// Timing protocol parameters. The repetition, warm-up and bootstrap counts
/// are configurable; the defaults below are what the CLI uses.
struct BenchConfig {
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> p_values;
  std::size_t repetitions = 50;
  std::size_t warmup_calls = 1;
  std::size_t bootstrap_reps = 1000;
  std::uint64_t seed = 0;
  std::vector<Method> methods = {Method::bariance, Method::centered};
  /// Optional slot for timing an ecosystem covariance routine against the
  /// built-in paths. When empty, external-baseline rows are marked skipped.
  std::function<CovMatrix(const DenseMatrix&)> external_baseline;

  void validate() const {
    if (n_values.empty() || p_values.empty()) {
      throw std::invalid_argument("need at least one n and one p");
    }
    for (std::size_t n : n_values) {
      if (n < 2) throw std::invalid_argument("n values must be at least 2");
    }
    for (std::size_t p : p_values) {
      if (p == 0) throw std::invalid_argument("p values must be positive");
    }
    if (repetitions < 3) {
      throw std::invalid_argument("repetitions must be at least 3");
    }
    if (bootstrap_reps < 100) {
      throw std::invalid_argument("bootstrap replicates must be at least 100");
    }
    if (methods.empty()) throw std::invalid_argument("no methods selected");
  }
};

/// Raw per-repetition runtimes for one (method, n, p) cell.
struct BenchSample {
  Method method = Method::bariance;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> runtimes_s;
};

/// Trimmed-mean runtime with a bootstrap percentile band.
struct BenchSummary {
  Method method = Method::bariance;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t repetitions = 0;
  std::size_t kept_count = 0;
  std::size_t removed_count = 0;
  double trimmed_mean_s = 0.0;
  double band_lo_s = 0.0;
  double band_hi_s = 0.0;
  bool skipped = false;
};

struct SpeedupRatio {
  std::size_t n = 0;
  std::size_t p = 0;
  double centered_over_bariance = 0.0;
};

/// i.i.d. standard normal matrix from the seeded portable generator;
/// identical (n, p, seed) gives an identical matrix.
inline DenseMatrix generate_data(std::size_t n, std::size_t p,
                                 std::uint64_t seed) {
  if (n == 0 || p == 0) throw std::invalid_argument("matrix dimensions must be positive");
  NormalSampler sampler(seed);
  DenseMatrix x(n, p);
  for (double& v : x.data()) v = sampler.next();
  return x;
}

/// Quantile by linear interpolation of order statistics at position
/// q * (m - 1). Input must be sorted.
inline double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct TrimResult {
  std::vector<double> kept;
  std::vector<double> removed;
};

/// Tukey 1.5 x IQR rule. Quartiles use the percentile() convention above;
/// values inside [Q1 - 1.5 IQR, Q3 + 1.5 IQR] (inclusive) are kept in their
/// original order.
inline TrimResult iqr_trim(std::span<const double> samples) {
  if (samples.size() < 3) {
    throw std::invalid_argument("need at least three samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = percentile(sorted, 0.25);
  const double q3 = percentile(sorted, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  TrimResult result;
  for (double v : samples) {
    if (v >= lo && v <= hi) {
      result.kept.push_back(v);
    } else {
      result.removed.push_back(v);
    }
  }
  return result;
}

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap band for the sample mean: resample with replacement
/// `reps` times, take each resample's mean, return the (1-level)/2 and
/// 1-(1-level)/2 empirical quantiles. Deterministic under the seed.
inline Band bootstrap_band(std::span<const double> samples, std::size_t reps,
                           double level, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("level must be in (0,1)");
  }
  Xoshiro256pp rng(seed);
  std::vector<double> means;
  means.reserve(reps);
  const std::size_t m = samples.size();
  for (std::size_t r = 0; r < reps; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += samples[rng.below(m)];
    }
    means.push_back(acc / static_cast<double>(m));
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {percentile(means, tail), percentile(means, 1.0 - tail)};
}

/// Seed for the data matrix of one (n, p) cell. Method-independent, so
/// every estimator in a run is timed on the same matrix.
inline std::uint64_t data_seed(std::uint64_t seed, std::size_t n,
                               std::size_t p) {
  return derive_seed(seed, 1, n, p);
}

namespace detail {

inline void keep_alive(const CovMatrix& sigma) {
  // stops the optimizer from dropping the timed call
  static volatile double sink;
  sink = sigma.data().empty() ? 0.0 : sigma.data()[0];
}

inline std::function<CovMatrix(const DenseMatrix&)> estimator_for(
    Method method, const BenchConfig& cfg) {
  switch (method) {
    case Method::bariance:
      return [](const DenseMatrix& x) { return cov_bariance(x); };
    case Method::centered:
      return [](const DenseMatrix& x) { return cov_centered(x); };
    case Method::external_baseline:
      return cfg.external_baseline;
  }
  return {};
}

}  // namespace detail

/// Times one estimator on one pre-generated matrix: warm-up calls are
/// discarded, then `repetitions` timed calls with a monotonic clock around
/// the estimator only. Runtimes are clamped to the 1 ns tick from below.
inline BenchSample time_method(
    const std::function<CovMatrix(const DenseMatrix&)>& fn, Method method,
    const DenseMatrix& x, std::size_t warmup_calls, std::size_t repetitions) {
  using clock = std::chrono::steady_clock;
  BenchSample sample{method, x.rows(), x.cols(), {}};
  sample.runtimes_s.reserve(repetitions);
  for (std::size_t w = 0; w < warmup_calls; ++w) {
    detail::keep_alive(fn(x));
  }
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    const CovMatrix sigma = fn(x);
    const auto t1 = clock::now();
    detail::keep_alive(sigma);
    const double dt = std::chrono::duration<double>(t1 - t0).count();
    sample.runtimes_s.push_back(std::max(dt, 1e-9));
  }
  return sample;
}

/// Trim, band (over the trimmed set) and average one sample.
inline BenchSummary summarize(const BenchSample& sample,
                              std::size_t bootstrap_reps,
                              std::uint64_t band_seed) {
  const TrimResult trimmed = iqr_trim(sample.runtimes_s);
  double mean = 0.0;
  for (double v : trimmed.kept) mean += v;
  mean /= static_cast<double>(trimmed.kept.size());
  const Band band = bootstrap_band(trimmed.kept, bootstrap_reps, 0.95, band_seed);
  BenchSummary summary;
  summary.method = sample.method;
  summary.n = sample.n;
  summary.p = sample.p;
  summary.repetitions = sample.runtimes_s.size();
  summary.kept_count = trimmed.kept.size();
  summary.removed_count = trimmed.removed.size();
  summary.trimmed_mean_s = mean;
  summary.band_lo_s = std::min(band.lo, mean);
  summary.band_hi_s = std::max(band.hi, mean);
  return summary;
}

/// Full protocol per (method, n, p): generate once per (n, p), warm up,
/// time, trim, band, summarize. Timing runs sequentially on one thread.
inline std::vector<BenchSummary> run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchSummary> summaries;
  for (std::size_t n : cfg.n_values) {
    for (std::size_t p : cfg.p_values) {
      const DenseMatrix x = generate_data(n, p, data_seed(cfg.seed, n, p));
      for (Method method : cfg.methods) {
        const auto fn = detail::estimator_for(method, cfg);
        if (!fn) {
          BenchSummary skipped;
          skipped.method = method;
          skipped.n = n;
          skipped.p = p;
          skipped.repetitions = cfg.repetitions;
          skipped.skipped = true;
          summaries.push_back(skipped);
          continue;
        }
        const BenchSample sample =
            time_method(fn, method, x, cfg.warmup_calls, cfg.repetitions);
        const std::uint64_t band_seed = derive_seed(
            cfg.seed, 1000 + static_cast<std::uint64_t>(method), n, p);
        summaries.push_back(summarize(sample, cfg.bootstrap_reps, band_seed));
      }
    }
  }
  return summaries;
}

/// trimmed_mean(centered) / trimmed_mean(bariance) per (n, p); values above
/// one favor the Gram-identity path. Reported, never asserted.
inline std::vector<SpeedupRatio> speedup_ratios(
    std::span<const BenchSummary> summaries) {
  std::vector<SpeedupRatio> ratios;
  for (const BenchSummary& a : summaries) {
    if (a.method != Method::bariance || a.skipped) continue;
    for (const BenchSummary& b : summaries) {
      if (b.method != Method::centered || b.skipped) continue;
      if (b.n == a.n && b.p == a.p && a.trimmed_mean_s > 0.0) {
        ratios.push_back({a.n, a.p, b.trimmed_mean_s / a.trimmed_mean_s});
      }
    }
  }
  return ratios;
}

/// Max entrywise deviation between the Gram-identity and centered paths on
/// standard normal data, per (n, p), maximized over `draws` seeded draws.
inline std::vector<EquivalenceReport> equivalence_sweep(
    std::span<const std::size_t> n_values, std::span<const std::size_t> p_values,
    std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw std::invalid_argument("need at least one draw");
  for (std::size_t n : n_values) {
    if (n < 2) throw std::invalid_argument("n values must be at least 2");
  }
  std::vector<EquivalenceReport> reports;
  for (std::size_t n : n_values) {
    for (std::size_t p : p_values) {
      double worst = 0.0;
      for (std::size_t draw = 0; draw < draws; ++draw) {
        const DenseMatrix x = generate_data(n, p, derive_seed(seed, n, p, draw));
        worst = std::max(worst, delta_max(cov_bariance(x), cov_centered(x)));
      }
      reports.push_back({n, p, worst, "bariance", "centered"});
    }
  }
  return reports;
}

}  // namespace gramcov
