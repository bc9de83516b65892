#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "gramcov/bench.hpp"
#include "gramcov/io.hpp"
#include "support/test_support.hpp"

using gramcov::DenseMatrix;
namespace io = gramcov::io;

TEST_CASE("matrix CSV parsing") {
  std::istringstream plain("1,3\n2,2\n3,1\n");
  const DenseMatrix x = io::read_matrix_csv(plain);
  REQUIRE(x.rows() == 3);
  REQUIRE(x.cols() == 2);
  CHECK(x(0, 1) == 3.0);
  CHECK(x(2, 0) == 3.0);

  std::istringstream with_header("alpha,beta\r\n1.5,-2\n0,4e-3\n");
  const DenseMatrix h = io::read_matrix_csv(with_header);
  REQUIRE(h.rows() == 2);
  CHECK(h(0, 0) == 1.5);
  CHECK(h(1, 1) == 4e-3);

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(ragged), io::ParseError);

  std::istringstream junk("1,2\nx,3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(junk), io::ParseError);

  std::istringstream nonfinite("1,2\nnan,3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(nonfinite), io::ParseError);

  std::istringstream infval("1,2\ninf,3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(infval), io::ParseError);

  std::istringstream empty("");
  CHECK_THROWS_AS(io::read_matrix_csv(empty), io::ParseError);

  std::istringstream header_only("a,b\n");
  const DenseMatrix zero_rows = io::read_matrix_csv(header_only);
  CHECK(zero_rows.rows() == 0);
  CHECK(zero_rows.cols() == 2);
}

TEST_CASE("17-digit formatting round-trips doubles exactly") {
  std::mt19937_64 rng(881);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = (i % 3 == 0) ? dist(rng) / dist(rng) : dist(rng);
    if (!std::isfinite(v)) continue;
    double back;
    REQUIRE(io::try_parse_real(io::format_real(v), back));
    CHECK(back == v);
  }
  CHECK(io::format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV -> binary -> CSV round trip is bit-exact") {
  std::mt19937_64 rng(882);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rng() % 20;
    const std::size_t p = 1 + rng() % 6;
    const DenseMatrix original =
        testsupport::random_uniform_matrix(rng, n, p, -1e3, 1e3);

    std::ostringstream csv1;
    io::write_matrix_csv(csv1, original);
    std::istringstream csv1_in(csv1.str());
    const DenseMatrix parsed = io::read_matrix_csv(csv1_in);
    CHECK(parsed.data() == original.data());

    std::ostringstream bin(std::ios::binary);
    io::write_matrix_binary(bin, parsed);
    std::istringstream bin_in(bin.str(), std::ios::binary);
    const DenseMatrix from_bin = io::read_matrix_binary(bin_in);
    CHECK(from_bin.data() == original.data());

    std::ostringstream csv2;
    io::write_matrix_csv(csv2, from_bin);
    CHECK(csv2.str() == csv1.str());
  }
}

TEST_CASE("binary reader rejects bad input") {
  std::istringstream bad_magic("NOPE!aaaaaaaaaaaaaaaa", std::ios::binary);
  CHECK_THROWS_AS(io::read_matrix_binary(bad_magic), io::ParseError);

  std::ostringstream truncated(std::ios::binary);
  io::write_matrix_binary(truncated, DenseMatrix(2, 2, {1, 2, 3, 4}));
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() - 5);
  std::istringstream trunc_in(bytes, std::ios::binary);
  CHECK_THROWS_AS(io::read_matrix_binary(trunc_in), io::ParseError);
}

TEST_CASE("weights CSV") {
  std::istringstream ok("2\n0\n1\n");
  CHECK(io::read_weights_csv(ok) == std::vector<std::uint64_t>{2, 0, 1});

  std::istringstream negative("1\n-2\n");
  CHECK_THROWS_AS(io::read_weights_csv(negative), io::ParseError);

  std::istringstream fractional("1.5\n");
  CHECK_THROWS_AS(io::read_weights_csv(fractional), io::ParseError);

  std::istringstream two_cols("1,2\n");
  CHECK_THROWS_AS(io::read_weights_csv(two_cols), io::ParseError);

  std::istringstream nothing("\n\n");
  CHECK_THROWS_AS(io::read_weights_csv(nothing), io::ParseError);
}

TEST_CASE("results CSV round trip") {
  gramcov::BenchConfig cfg;
  cfg.n_values = {32};
  cfg.p_values = {2, 3};
  cfg.repetitions = 5;
  cfg.bootstrap_reps = 120;
  cfg.seed = 17;
  const auto summaries = gramcov::run_benchmark(cfg);

  std::ostringstream out;
  io::write_results_csv(out, summaries, cfg.seed);
  const std::string text = out.str();
  CHECK(text.rfind(std::string(io::kResultsHeader) + "\n", 0) == 0);

  std::istringstream in(text);
  const auto rows = io::read_results_csv(in);
  REQUIRE(rows.size() == summaries.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].method == gramcov::method_name(summaries[i].method));
    CHECK(rows[i].n == summaries[i].n);
    CHECK(rows[i].p == summaries[i].p);
    CHECK(rows[i].kept == summaries[i].kept_count);
    CHECK(rows[i].removed == summaries[i].removed_count);
    CHECK(rows[i].trimmed_mean_s == summaries[i].trimmed_mean_s);
    CHECK(rows[i].band_lo_s == summaries[i].band_lo_s);
    CHECK(rows[i].band_hi_s == summaries[i].band_hi_s);
    CHECK(rows[i].seed == 17);
  }

  std::istringstream wrong_header("a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_results_csv(wrong_header), io::ParseError);
}

TEST_CASE("verify CSV round trip") {
  const std::vector<std::size_t> ns{50};
  const std::vector<std::size_t> ps{3};
  const auto reports = gramcov::equivalence_sweep(ns, ps, 2, 123);

  std::ostringstream out;
  io::write_verify_csv(out, reports, 2, 123);
  std::istringstream in(out.str());
  const auto rows = io::read_verify_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 50);
  CHECK(rows[0].p == 3);
  CHECK(rows[0].draws == 2);
  CHECK(rows[0].max_delta == reports[0].delta_max);
  CHECK(rows[0].seed == 123);
}
