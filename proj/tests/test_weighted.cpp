#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/weighted.hpp"
#include "support/test_support.hpp"

using gramcov::CovMatrix;
using gramcov::DenseMatrix;
using gramcov::WeightVector;

namespace {

DenseMatrix expand(const DenseMatrix& x, const WeightVector& w) {
  DenseMatrix out(w.total(), x.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::uint64_t c = 0; c < w.values()[i]; ++c) {
      for (std::size_t k = 0; k < x.cols(); ++k) out(r, k) = x(i, k);
      ++r;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("weighted covariance examples") {
  const auto x = DenseMatrix::from_rows({{1, 3}, {2, 2}, {3, 1}});

  const CovMatrix unit = gramcov::cov_weighted(x, WeightVector({1, 1, 1}));
  CHECK(unit(0, 0) == 1.0);
  CHECK(unit(0, 1) == -1.0);
  CHECK(unit(1, 1) == 1.0);

  const WeightVector w201({2, 0, 1});
  const CovMatrix resampled = gramcov::cov_weighted(x, w201);
  const CovMatrix expanded = gramcov::cov_bariance(expand(x, w201));
  CHECK(resampled(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(resampled(0, 1) == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
  CHECK(gramcov::delta_max(resampled, expanded) <= 1e-10);

  CHECK_THROWS_WITH_AS(gramcov::cov_weighted(x, WeightVector({1, 0, 0})),
                       "need at least two observations", std::invalid_argument);
  CHECK_THROWS_AS(gramcov::cov_weighted(x, WeightVector({1, 1})),
                  std::invalid_argument);
}

TEST_CASE("unit weights reproduce cov_bariance bit-exactly") {
  std::mt19937_64 rng(551);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 30;
    const std::size_t p = 1 + rng() % 5;
    const auto x = testsupport::random_uniform_matrix(rng, n, p, -9, 9);
    const CovMatrix weighted =
        gramcov::cov_weighted(x, WeightVector(std::vector<std::uint64_t>(n, 1)));
    const CovMatrix plain = gramcov::cov_bariance(x);
    CHECK(weighted.data() == plain.data());
  }
}

TEST_CASE("weighted covariance equals the expanded resample") {
  std::mt19937_64 rng(552);
  int checked = 0;
  while (checked < 40) {
    const std::size_t n = 1 + rng() % 20;
    const std::size_t p = 1 + rng() % 4;
    std::vector<std::uint64_t> raw(n);
    for (auto& wi : raw) wi = rng() % 4;
    const WeightVector w(std::move(raw));
    if (w.total() < 2) continue;
    const auto x = testsupport::random_uniform_matrix(rng, n, p, -10, 10);
    const CovMatrix direct = gramcov::cov_weighted(x, w);
    const CovMatrix expanded = gramcov::cov_bariance(expand(x, w));
    CHECK(gramcov::delta_max(direct, expanded) <= 1e-10);
    ++checked;
  }
}

TEST_CASE("multinomial weights") {
  const WeightVector single = gramcov::multinomial_weights(1, 99);
  CHECK(single.values() == std::vector<std::uint64_t>{1});

  const WeightVector a = gramcov::multinomial_weights(5, 1234);
  const WeightVector b = gramcov::multinomial_weights(5, 1234);
  CHECK(a.values() == b.values());

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CHECK(gramcov::multinomial_weights(17, seed).total() == 17);
  }

  CHECK_THROWS_AS(gramcov::multinomial_weights(0, 1), std::invalid_argument);

  // law of large numbers: per-coordinate mean of w_i over many draws is ~1
  const std::size_t n = 8;
  std::vector<double> totals(n, 0.0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const WeightVector w = gramcov::multinomial_weights(n, 7000 + d);
    for (std::size_t i = 0; i < n; ++i) {
      totals[i] += static_cast<double>(w.values()[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(totals[i] / draws - 1.0) <= 0.05);
  }
}
