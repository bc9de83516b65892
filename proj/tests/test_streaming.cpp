#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gramcov/estimators.hpp"
#include "gramcov/streaming.hpp"
#include "support/test_support.hpp"

using gramcov::CovMatrix;
using gramcov::DenseMatrix;
using gramcov::RealVector;
using gramcov::StreamState;

namespace {

DenseMatrix prefix(const DenseMatrix& x, std::size_t t) {
  DenseMatrix out(t, x.cols());
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) out(i, k) = x(i, k);
  }
  return out;
}

}  // namespace

TEST_CASE("construction") {
  const StreamState s(2);
  CHECK(s.count() == 0);
  CHECK(s.sums() == RealVector{0, 0});
  CHECK(s.cross_products().max_abs() == 0.0);

  const StreamState anchored(1, RealVector{5});
  CHECK(anchored.shift() == RealVector{5});
  CHECK(anchored.count() == 0);

  CHECK_THROWS_AS(StreamState(0), std::invalid_argument);
  CHECK_THROWS_AS(StreamState(2, RealVector{1}), std::invalid_argument);
}

TEST_CASE("update accumulates running sums") {
  StreamState s(2);
  s.update(std::vector<double>{1, 3});
  CHECK(s.count() == 1);
  CHECK(s.sums() == RealVector{1, 3});
  CHECK(s.cross_products()(0, 0) == 1.0);
  CHECK(s.cross_products()(0, 1) == 3.0);
  CHECK(s.cross_products()(1, 1) == 9.0);

  s.update(std::vector<double>{2, 2});
  CHECK(s.count() == 2);
  CHECK(s.sums() == RealVector{3, 5});
  CHECK(s.cross_products()(0, 0) == 5.0);
  CHECK(s.cross_products()(0, 1) == 7.0);
  CHECK(s.cross_products()(1, 1) == 13.0);

  const CovMatrix sigma = s.covariance();
  CHECK(sigma(0, 0) == 0.5);
  CHECK(sigma(0, 1) == -0.5);
  CHECK(sigma(1, 1) == 0.5);

  s.update(std::vector<double>{3, 1});
  const CovMatrix sigma3 = s.covariance();
  CHECK(sigma3(0, 0) == 1.0);
  CHECK(sigma3(0, 1) == -1.0);

  CHECK_THROWS_AS(s.update(std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(s.update(std::vector<double>{1, std::nan("")}),
                  std::invalid_argument);
}

TEST_CASE("covariance requires two observations") {
  StreamState s(2);
  CHECK_THROWS_WITH_AS(s.covariance(), "need at least two observations",
                       std::invalid_argument);
  s.update(std::vector<double>{1, 2});
  CHECK_THROWS_AS(s.covariance(), std::invalid_argument);
  s.update(std::vector<double>{1, 2});
  CHECK(s.covariance().max_abs() == 0.0);  // two identical rows
}

TEST_CASE("zero-shift streaming reproduces the batch estimator exactly") {
  std::mt19937_64 rng(321);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng() % 40;
    const std::size_t p = 1 + rng() % 6;
    const auto x = testsupport::random_uniform_matrix(rng, n, p, -10, 10);
    StreamState s(p);
    for (std::size_t t = 1; t <= n; ++t) {
      s.update(x.row(t - 1));
      if (t < 2) continue;
      const CovMatrix batch = gramcov::cov_bariance(prefix(x, t));
      CHECK(gramcov::delta_max(s.covariance(), batch) == 0.0);
    }
  }
}

TEST_CASE("merge identity and order equivalence") {
  std::mt19937_64 rng(322);
  const auto x = testsupport::random_uniform_matrix(rng, 12, 3, -5, 5);

  StreamState whole(3);
  StreamState left(3);
  StreamState right(3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    whole.update(x.row(i));
    (i < 6 ? left : right).update(x.row(i));
  }

  const StreamState empty(3);
  const StreamState merged_identity = StreamState::merge(empty, whole);
  CHECK(merged_identity.count() == whole.count());
  CHECK(gramcov::delta_max(merged_identity.covariance(), whole.covariance()) == 0.0);

  // split in arrival order: sums coincide with the sequential stream
  const StreamState merged = StreamState::merge(left, right);
  CHECK(merged.count() == 12);
  CHECK(gramcov::delta_max(merged.covariance(), whole.covariance()) <=
        1e-10 * std::max(1.0, whole.covariance().max_abs()));

  // two singleton accumulators merge into the two-row stream exactly
  StreamState first(3);
  StreamState second(3);
  first.update(x.row(0));
  second.update(x.row(1));
  StreamState pair(3);
  pair.update(x.row(0));
  pair.update(x.row(1));
  const StreamState joined = StreamState::merge(first, second);
  CHECK(joined.sums() == pair.sums());
  CHECK(gramcov::delta_max(joined.covariance(), pair.covariance()) == 0.0);

  CHECK_THROWS_WITH_AS(StreamState::merge(StreamState(3, RealVector{1, 0, 0}),
                                          StreamState(3)),
                       "shift mismatch", std::invalid_argument);
  CHECK_THROWS_AS(StreamState::merge(StreamState(2), StreamState(3)),
                  std::invalid_argument);
}

TEST_CASE("merge is associative up to summation order") {
  std::mt19937_64 rng(323);
  const auto x = testsupport::random_uniform_matrix(rng, 18, 2, -3, 3);
  StreamState a(2);
  StreamState b(2);
  StreamState c(2);
  for (std::size_t i = 0; i < 6; ++i) a.update(x.row(i));
  for (std::size_t i = 6; i < 12; ++i) b.update(x.row(i));
  for (std::size_t i = 12; i < 18; ++i) c.update(x.row(i));

  const auto ab_c = StreamState::merge(StreamState::merge(a, b), c);
  const auto a_bc = StreamState::merge(a, StreamState::merge(b, c));
  CHECK(gramcov::delta_max(ab_c.covariance(), a_bc.covariance()) <= 1e-10);
}

TEST_CASE("first-row anchoring keeps far-from-origin streams accurate") {
  std::mt19937_64 rng(324);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = 500;
  const std::size_t p = 3;
  DenseMatrix x(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      x(i, k) = 1e6 + noise(rng);  // column means of magnitude 1e6
    }
  }
  StreamState anchored(p, RealVector(x.row(0).begin(), x.row(0).end()));
  for (std::size_t i = 0; i < n; ++i) anchored.update(x.row(i));

  const CovMatrix reference = gramcov::cov_centered(x);
  const double rel = gramcov::delta_max(anchored.covariance(), reference) /
                     std::max(1.0, reference.max_abs());
  CHECK(rel <= 1e-9);
  // zero-shift streaming on the same data may lose digits; not asserted
}
