#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/matrix.hpp"

namespace gramcov {

/// Empirical covariance of per-observation score rows, the "meat" of
/// sandwich variance estimators. Same code path as cov_bariance; the
/// distinct name marks the distinct contract (scores, not data).
inline CovMatrix sandwich_score_cov(const DenseMatrix& scores) {
  return cov_bariance(scores);
}

/// One panel unit: T period rows by p variables.
struct PanelBlock {
  std::string unit_id;
  DenseMatrix observations;
};

/// Within-unit covariance (X^T X - s s^T / T) / (T-1), the demeaned
/// fixed-effects block without forming the T x T projector.
inline CovMatrix panel_within_cov(const PanelBlock& block) {
  const DenseMatrix& x = block.observations;
  const std::size_t t = x.rows();
  if (t < 2) throw std::invalid_argument("need at least two periods");
  const std::size_t p = x.cols();
  const RealVector s = column_sums(x);
  const SymmetricMatrix g = gram(x);
  const double td = static_cast<double>(t);
  CovMatrix sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k; l < p; ++l) {
      sigma.set(k, l, (g(k, l) - s[k] * s[l] / td) / (td - 1.0));
    }
  }
  return sigma;
}

/// Per-unit within covariances. Blocks are independent; a block with fewer
/// than two periods fails with the offending unit named.
inline std::map<std::string, CovMatrix> panel_within_cov_all(
    std::span<const PanelBlock> blocks) {
  std::map<std::string, CovMatrix> out;
  for (const PanelBlock& block : blocks) {
    if (block.observations.rows() < 2) {
      throw std::invalid_argument("block '" + block.unit_id +
                                  "' needs at least two periods");
    }
    out.emplace(block.unit_id, panel_within_cov(block));
  }
  return out;
}

}  // namespace gramcov
