#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "gramcov/matrix.hpp"

namespace gramcov {

/// Unbiased covariance matrix (denominator n-1), structurally symmetric.
using CovMatrix = SymmetricMatrix;

/// Sufficient statistics for the scalar sum identities.
struct ScalarSums {
  std::size_t n = 0;
  double s_x = 0.0;
  double s_y = 0.0;
  double s_xx = 0.0;
  double s_yy = 0.0;
  double s_xy = 0.0;

  static ScalarSums accumulate(std::span<const double> x,
                               std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    ScalarSums s;
    s.n = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      s.s_x += x[i];
      s.s_y += y[i];
      s.s_xx += x[i] * x[i];
      s.s_yy += y[i] * y[i];
      s.s_xy += x[i] * y[i];
    }
    return s;
  }
};

/// Result of comparing two covariance estimates entrywise.
struct EquivalenceReport {
  std::size_t n = 0;
  std::size_t p = 0;
  double delta_max = 0.0;
  std::string method_a;
  std::string method_b;
};

namespace detail {

/// (n*S_xy - S_x*S_y) / (n*(n-1)). Every estimator that must agree with
/// cov_bariance bit-exactly (scalar, streaming, weighted, sandwich) funnels
/// through this one expression.
inline double cov_from_sums(std::size_t n, double s_xy, double s_x,
                            double s_y) {
  const double nd = static_cast<double>(n);
  return (nd * s_xy - s_x * s_y) / (nd * (nd - 1.0));
}

inline void require_at_least_two(std::size_t n) {
  if (n < 2) throw std::invalid_argument("need at least two observations");
}

}  // namespace detail

/// Mean pairwise squared difference, computed from scalar sums in O(n).
/// Equals the unbiased sample variance.
inline double bariance(std::span<const double> x) {
  detail::require_at_least_two(x.size());
  double s_x = 0.0;
  double s_xx = 0.0;
  for (double v : x) {
    s_x += v;
    s_xx += v * v;
  }
  return detail::cov_from_sums(x.size(), s_xx, s_x, s_x);
}

/// O(n^2) oracle: literal double sum over ordered pairs i != j.
inline double bariance_bruteforce(std::span<const double> x) {
  const std::size_t n = x.size();
  detail::require_at_least_two(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = x[i] - x[j];
      acc += d * d;
    }
  }
  const double nd = static_cast<double>(n);
  return acc / (2.0 * nd * (nd - 1.0));
}

/// Pairwise covariance from scalar sums in O(n). Equals the textbook
/// unbiased covariance.
inline double pairwise_cov(std::span<const double> x,
                           std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  detail::require_at_least_two(x.size());
  double s_x = 0.0;
  double s_y = 0.0;
  double s_xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s_x += x[i];
    s_y += y[i];
    s_xy += x[i] * y[i];
  }
  return detail::cov_from_sums(x.size(), s_xy, s_x, s_y);
}

/// O(n^2) oracle: literal double sum over ordered pairs i != j.
inline double pairwise_cov_bruteforce(std::span<const double> x,
                                      std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = x.size();
  detail::require_at_least_two(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += (x[i] - x[j]) * (y[i] - y[j]);
    }
  }
  const double nd = static_cast<double>(n);
  return acc / (2.0 * nd * (nd - 1.0));
}

/// Covariance via the Gram identity: (n X^T X - s s^T) / (n(n-1)).
/// One Gram product plus one rank-one correction; no n x p intermediate.
inline CovMatrix cov_bariance(const DenseMatrix& x) {
  detail::require_at_least_two(x.rows());
  const RealVector s = column_sums(x);
  const SymmetricMatrix g = gram(x);
  const std::size_t p = x.cols();
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      sigma.set(k, l, detail::cov_from_sums(x.rows(), g(k, l), s[k], s[l]));
    }
  }
  return sigma;
}

/// Center-then-multiply covariance: materializes the demeaned n x p matrix
/// and forms one Gram product scaled by 1/(n-1).
inline CovMatrix cov_centered(const DenseMatrix& x) {
  detail::require_at_least_two(x.rows());
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const RealVector s = column_sums(x);
  RealVector mean(p);
  for (std::size_t k = 0; k < p; ++k) {
    mean[k] = s[k] / static_cast<double>(n);
  }
  DenseMatrix centered(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      centered(i, k) = x(i, k) - mean[k];
    }
  }
  const SymmetricMatrix g = gram(centered);
  const double denom = static_cast<double>(n) - 1.0;
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      sigma.set(k, l, g(k, l) / denom);
    }
  }
  return sigma;
}

/// O(n^2 p^2) oracle: per entry, the literal sum over unordered pairs i < j
/// of (x_ik - x_jk)(x_il - x_jl), divided by n(n-1).
inline CovMatrix cov_pairwise_bruteforce(const DenseMatrix& x) {
  const std::size_t n = x.rows();
  detail::require_at_least_two(n);
  const std::size_t p = x.cols();
  const double nd = static_cast<double>(n);
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          acc += (x(i, k) - x(j, k)) * (x(i, l) - x(j, l));
        }
      }
      sigma.set(k, l, acc / (nd * (nd - 1.0)));
    }
  }
  return sigma;
}

/// Verification path through the explicit centering matrix:
/// (1/(n-1)) X^T H X with H = I - (1/n) 1 1^T. Materializes H (n x n), so
/// keep n modest.
inline CovMatrix cov_via_centering_matrix(const DenseMatrix& x) {
  detail::require_at_least_two(x.rows());
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const SymmetricMatrix h = centering_matrix(n);
  DenseMatrix hx(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += h(i, j) * x(j, k);
      }
      hx(i, k) = acc;
    }
  }
  const double denom = static_cast<double>(n) - 1.0;
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += x(i, k) * hx(i, l);
      }
      sigma.set(k, l, acc / denom);
    }
  }
  return sigma;
}

/// Max absolute entrywise deviation between two covariance estimates.
inline double delta_max(const CovMatrix& a, const CovMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  double m = 0.0;
  for (std::size_t idx = 0; idx < a.data().size(); ++idx) {
    m = std::max(m, std::abs(a.data()[idx] - b.data()[idx]));
  }
  return m;
}

}  // namespace gramcov
