#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gramcov {

using RealVector = std::vector<double>;

/// Row-major dense matrix of 64-bit reals. Rows are observations, columns
/// are variables.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("matrix data length must equal rows*cols");
    }
  }

  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    DenseMatrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw std::invalid_argument("ragged rows");
      m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t k) const {
    return data_[i * cols_ + k];
  }
  double& operator()(std::size_t i, std::size_t k) {
    return data_[i * cols_ + k];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense symmetric matrix. Mutation goes through set()/add(), which assign
/// the mirrored entry from the same computed value, so the two triangles
/// stay bit-identical at all times.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim)
      : dim_(dim), data_(dim * dim, 0.0) {}

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t k, std::size_t l) const {
    return data_[k * dim_ + l];
  }

  void set(std::size_t k, std::size_t l, double v) {
    data_[k * dim_ + l] = v;
    data_[l * dim_ + k] = v;
  }

  void add(std::size_t k, std::size_t l, double v) {
    const auto [a, b] = std::minmax(k, l);
    double& upper = data_[a * dim_ + b];
    upper += v;
    data_[b * dim_ + a] = upper;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// s[k] = sum_i X(i,k). Per entry the terms are added in row order i = 0..n-1
/// (single left-to-right accumulator, no pairwise or compensated summation);
/// every other sum in the library follows the same order so results compare
/// deterministically.
inline RealVector column_sums(const DenseMatrix& x) {
  RealVector sums(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      sums[k] += x(i, k);
    }
  }
  return sums;
}

/// G[k][l] = sum_i X(i,k) * X(i,l). Only the upper triangle is computed
/// (innermost loop over i), the lower triangle is mirrored.
inline SymmetricMatrix gram(const DenseMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  SymmetricMatrix g(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += x(i, k) * x(i, l);
      }
      g.set(k, l, acc);
    }
  }
  return g;
}

/// Outer product u v^T as a dense len(u) x len(v) matrix.
inline DenseMatrix outer(std::span<const double> u, std::span<const double> v) {
  DenseMatrix m(u.size(), v.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    for (std::size_t l = 0; l < v.size(); ++l) {
      m(k, l) = u[k] * v[l];
    }
  }
  return m;
}

/// H = I_n - (1/n) 1 1^T, the idempotent projector that removes column
/// means. Built only for verification paths; the estimators never form it.
inline SymmetricMatrix centering_matrix(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty centering matrix");
  SymmetricMatrix h(n);
  const double off = -1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      h.set(i, j, i == j ? 1.0 + off : off);
    }
  }
  return h;
}

}  // namespace gramcov
