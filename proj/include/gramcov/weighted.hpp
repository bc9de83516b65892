#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/matrix.hpp"
#include "gramcov/rng.hpp"

namespace gramcov {

/// Nonnegative integer multiplicities describing a resample without
/// expanding it. total() caches n* = sum of the weights.
class WeightVector {
 public:
  explicit WeightVector(std::vector<std::uint64_t> w)
      : w_(std::move(w)),
        total_(std::accumulate(w_.begin(), w_.end(), std::uint64_t{0})) {}

  std::size_t size() const { return w_.size(); }
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& values() const { return w_; }

 private:
  std::vector<std::uint64_t> w_;
  std::uint64_t total_;
};

/// Covariance of the resample described by multiplicity weights, computed
/// from the weighted Gram pair (sum_i w_i x_i x_i^T, sum_i w_i x_i) without
/// materializing the expanded resample. Rows with zero weight are skipped.
/// With unit weights the accumulation and the final expression are the same
/// arithmetic as cov_bariance, so the results are bit-identical.
inline CovMatrix cov_weighted(const DenseMatrix& x, const WeightVector& w) {
  if (w.size() != x.rows()) throw std::invalid_argument("weight length mismatch");
  if (w.total() < 2) throw std::invalid_argument("need at least two observations");
  const std::size_t p = x.cols();
  RealVector sw(p, 0.0);
  SymmetricMatrix gw(p);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::uint64_t wi = w.values()[i];
    if (wi == 0) continue;
    const double wd = static_cast<double>(wi);
    for (std::size_t k = 0; k < p; ++k) {
      sw[k] += wd * x(i, k);
    }
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = k; l < p; ++l) {
        gw.add(k, l, wd * (x(i, k) * x(i, l)));
      }
    }
  }
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      sigma.set(k, l, detail::cov_from_sums(w.total(), gw(k, l), sw[k], sw[l]));
    }
  }
  return sigma;
}

/// One bootstrap resample as multiplicities: n draws from Multinomial(n;
/// 1/n,...,1/n). Deterministic under the seed; the weights always sum to n.
inline WeightVector multinomial_weights(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one observation");
  Xoshiro256pp rng(seed);
  std::vector<std::uint64_t> w(n, 0);
  for (std::size_t draw = 0; draw < n; ++draw) {
    ++w[rng.below(n)];
  }
  return WeightVector(std::move(w));
}

}  // namespace gramcov
