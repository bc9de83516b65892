#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/matrix.hpp"

namespace gramcov {

/// Online unbiased covariance from cumulative sums: after t updates the
/// state holds S = sum of (shifted) rows and G = sum of their outer
/// products, accumulated in arrival order so they match the batch kernels
/// bit-exactly. Each update costs O(p^2); nothing scales with t.
///
/// The optional shift anchor is subtracted from every incoming row. The
/// covariance is shift-invariant, so this is a mathematical no-op, but
/// anchoring near the data keeps the t*G - S S^T cancellation benign for
/// far-from-origin streams.
class StreamState {
 public:
  explicit StreamState(std::size_t p) : StreamState(p, RealVector(p, 0.0)) {}

  StreamState(std::size_t p, RealVector shift)
      : sums_(p, 0.0), cross_(p), shift_(std::move(shift)), scratch_(p) {
    if (p == 0) throw std::invalid_argument("stream dimension must be positive");
    if (shift_.size() != p) throw std::invalid_argument("shift length mismatch");
  }

  std::size_t dim() const { return sums_.size(); }
  std::size_t count() const { return count_; }
  const RealVector& sums() const { return sums_; }
  const SymmetricMatrix& cross_products() const { return cross_; }
  const RealVector& shift() const { return shift_; }

  void update(std::span<const double> x) {
    const std::size_t p = dim();
    if (x.size() != p) throw std::invalid_argument("dimension mismatch");
    for (double v : x) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry");
    }
    for (std::size_t k = 0; k < p; ++k) {
      scratch_[k] = x[k] - shift_[k];
    }
    for (std::size_t k = 0; k < p; ++k) {
      sums_[k] += scratch_[k];
    }
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = k; l < p; ++l) {
        cross_.add(k, l, scratch_[k] * scratch_[l]);
      }
    }
    ++count_;
  }

  /// (t G - S S^T) / (t(t-1)); same expression as cov_bariance, so a
  /// zero-shift stream reproduces the batch result exactly.
  CovMatrix covariance() const {
    if (count_ < 2) {
      throw std::invalid_argument("need at least two observations");
    }
    const std::size_t p = dim();
    CovMatrix sigma(p);
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = k; l < p; ++l) {
        sigma.set(k, l,
                  detail::cov_from_sums(count_, cross_(k, l), sums_[k], sums_[l]));
      }
    }
    return sigma;
  }

  /// Combines two accumulators built over disjoint row sets. Requires equal
  /// dimensions and bit-identical shifts.
  static StreamState merge(const StreamState& a, const StreamState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    for (std::size_t k = 0; k < a.dim(); ++k) {
      if (std::bit_cast<std::uint64_t>(a.shift_[k]) !=
          std::bit_cast<std::uint64_t>(b.shift_[k])) {
        throw std::invalid_argument("shift mismatch");
      }
    }
    StreamState out(a.dim(), a.shift_);
    out.count_ = a.count_ + b.count_;
    for (std::size_t k = 0; k < a.dim(); ++k) {
      out.sums_[k] = a.sums_[k] + b.sums_[k];
    }
    for (std::size_t k = 0; k < a.dim(); ++k) {
      for (std::size_t l = k; l < a.dim(); ++l) {
        out.cross_.set(k, l, a.cross_(k, l) + b.cross_(k, l));
      }
    }
    return out;
  }

 private:
  std::size_t count_ = 0;
  RealVector sums_;
  SymmetricMatrix cross_;
  RealVector shift_;
  RealVector scratch_;
};

}  // namespace gramcov
