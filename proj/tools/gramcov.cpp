// gramcov: covariance matrices through the Gram identity
// (n X^T X - s s^T) / (n(n-1)), plus an equivalence verifier and a
// timing harness for the centered-vs-Gram comparison.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gramcov/gramcov.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerifyFailed = 3;

constexpr double kVerifyTolerance = 1e-12;
constexpr std::uint64_t kBuiltinSeed = 42;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GRAMCOV_SEED")) {
    std::uint64_t v;
    if (gramcov::io::try_parse_u64(gramcov::io::trim(env), v)) return v;
    std::cerr << "warning: ignoring unparsable GRAMCOV_SEED\n";
  }
  return kBuiltinSeed;
}

void write_matrix(std::ostream& out, const gramcov::CovMatrix& sigma) {
  for (std::size_t k = 0; k < sigma.dim(); ++k) {
    for (std::size_t l = 0; l < sigma.dim(); ++l) {
      out << gramcov::io::format_real(sigma(k, l));
      out << (l + 1 < sigma.dim() ? ',' : '\n');
    }
  }
}

int with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return kExitOk;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return kExitUsage;
  }
  fn(out);
  return kExitOk;
}

struct CovOpts {
  std::string input;
  std::string method = "bariance";
  std::string weights_path;
  std::string output;
};

int run_cov(const CovOpts& opts) {
  const gramcov::DenseMatrix x = gramcov::io::read_matrix_file(opts.input);
  gramcov::CovMatrix sigma;
  if (!opts.weights_path.empty()) {
    std::ifstream win(opts.weights_path);
    if (!win) {
      std::cerr << "error: cannot open '" << opts.weights_path << "'\n";
      return kExitUsage;
    }
    const auto raw = gramcov::io::read_weights_csv(win);
    if (raw.size() != x.rows()) {
      std::cerr << "error: " << raw.size() << " weights for " << x.rows()
                << " observations\n";
      return kExitDomain;
    }
    sigma = gramcov::cov_weighted(x, gramcov::WeightVector(raw));
  } else if (opts.method == "bariance") {
    sigma = gramcov::cov_bariance(x);
  } else if (opts.method == "centered") {
    sigma = gramcov::cov_centered(x);
  } else {
    sigma = gramcov::cov_pairwise_bruteforce(x);
  }
  return with_output(opts.output, [&](std::ostream& out) { write_matrix(out, sigma); });
}

struct VerifyOpts {
  std::vector<std::size_t> n_values = {100, 1000, 4000};
  std::vector<std::size_t> p_values = {10, 50};
  std::size_t draws = 5;
  std::uint64_t seed = 0;
  std::string output;
};

int run_verify(const VerifyOpts& opts) {
  for (std::size_t n : opts.n_values) {
    if (n < 2) {
      std::cerr << "error: invalid size n=" << n << " (need n >= 2)\n";
      return kExitDomain;
    }
  }
  if (opts.draws == 0) {
    std::cerr << "error: need at least one draw\n";
    return kExitDomain;
  }
  const auto reports = gramcov::equivalence_sweep(opts.n_values, opts.p_values,
                                                  opts.draws, opts.seed);
  std::cout << "      n      p  draws              max_delta\n";
  bool all_ok = true;
  for (const auto& r : reports) {
    std::cout << std::setw(7) << r.n << std::setw(7) << r.p << std::setw(7)
              << opts.draws << "  " << std::setw(21)
              << gramcov::io::format_real(r.delta_max) << '\n';
    all_ok = all_ok && r.delta_max < kVerifyTolerance;
  }
  std::cout << (all_ok ? "verdict: PASS" : "verdict: FAIL")
            << " (tolerance " << gramcov::io::format_real(kVerifyTolerance)
            << ", seed " << opts.seed << ")\n";
  if (!opts.output.empty()) {
    std::ofstream out(opts.output);
    if (!out) {
      std::cerr << "error: cannot write '" << opts.output << "'\n";
      return kExitUsage;
    }
    gramcov::io::write_verify_csv(out, reports, opts.draws, opts.seed);
  }
  return all_ok ? kExitOk : kExitVerifyFailed;
}

struct BenchOpts {
  std::vector<std::size_t> n_values = {1000, 4000};
  std::vector<std::size_t> p_values = {10, 50};
  std::size_t reps = 50;
  std::size_t warmup = 1;
  std::size_t boot = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"bariance", "centered"};
  std::string output = "bench_results.csv";
};

int run_bench(const BenchOpts& opts) {
  gramcov::BenchConfig cfg;
  cfg.n_values = opts.n_values;
  cfg.p_values = opts.p_values;
  cfg.repetitions = opts.reps;
  cfg.warmup_calls = opts.warmup;
  cfg.bootstrap_reps = opts.boot;
  cfg.seed = opts.seed;
  cfg.methods.clear();
  for (const std::string& name : opts.methods) {
    const auto method = gramcov::parse_method(name);
    if (!method) {
      std::cerr << "error: unknown method '" << name << "'\n";
      return kExitUsage;
    }
    cfg.methods.push_back(*method);
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto summaries = gramcov::run_benchmark(cfg);

  std::ofstream out(opts.output);
  if (!out) {
    std::cerr << "error: cannot write '" << opts.output << "'\n";
    return kExitUsage;
  }
  gramcov::io::write_results_csv(out, summaries, cfg.seed);

  std::cout << "method             n      p   kept  removed   trimmed_mean_s"
               "        band_lo_s        band_hi_s\n";
  for (const auto& s : summaries) {
    if (s.skipped) {
      std::cout << std::left << std::setw(18) << gramcov::method_name(s.method)
                << std::right << std::setw(7) << s.n << std::setw(7) << s.p
                << "   (skipped: no implementation registered)\n";
      continue;
    }
    std::cout << std::left << std::setw(18) << gramcov::method_name(s.method)
              << std::right << std::setw(7) << s.n << std::setw(7) << s.p
              << std::setw(7) << s.kept_count << std::setw(9) << s.removed_count
              << "  " << std::setw(15) << gramcov::io::format_real(s.trimmed_mean_s)
              << "  " << std::setw(15) << gramcov::io::format_real(s.band_lo_s)
              << "  " << std::setw(15) << gramcov::io::format_real(s.band_hi_s)
              << '\n';
  }
  const auto ratios = gramcov::speedup_ratios(summaries);
  if (!ratios.empty()) {
    std::cout << "\nspeedup centered/bariance (values > 1 favor bariance):\n";
    for (const auto& r : ratios) {
      std::cout << "  n=" << r.n << " p=" << r.p << "  ratio="
                << gramcov::io::format_real(r.centered_over_bariance) << '\n';
    }
  }
  std::cout << "results written to " << opts.output << '\n';
  return kExitOk;
}

struct StreamOpts {
  std::string input;
  std::string shift = "none";
  std::size_t emit_every = 0;
};

int run_stream(const StreamOpts& opts) {
  const gramcov::DenseMatrix x = gramcov::io::read_matrix_file(opts.input);
  if (x.rows() < 2) {
    std::cerr << "error: need at least two observations\n";
    return kExitDomain;
  }
  gramcov::StreamState state =
      opts.shift == "first-row"
          ? gramcov::StreamState(x.cols(), gramcov::RealVector(
                                               x.row(0).begin(), x.row(0).end()))
          : gramcov::StreamState(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    state.update(x.row(i));
    const std::size_t t = state.count();
    if (opts.emit_every > 0 && t >= 2 && t < x.rows() &&
        t % opts.emit_every == 0) {
      std::cout << "# t=" << t << '\n';
      write_matrix(std::cout, state.covariance());
    }
  }
  if (opts.emit_every > 0) std::cout << "# t=" << state.count() << '\n';
  write_matrix(std::cout, state.covariance());
  return kExitOk;
}

struct PlotOpts {
  std::string results;
  std::string kind;
  std::string output;
};

std::string csv_field(double v) { return gramcov::io::format_real(v); }

int run_plotdata(const PlotOpts& opts) {
  std::ifstream in(opts.results);
  if (!in) {
    std::cerr << "error: cannot open '" << opts.results << "'\n";
    return kExitUsage;
  }
  std::ostringstream body;

  if (opts.kind == "error") {
    const auto rows = gramcov::io::read_verify_csv(in);
    if (rows.empty()) {
      std::cerr << "error: no data rows in '" << opts.results << "'\n";
      return kExitUsage;
    }
    std::set<std::size_t> ps;
    for (const auto& r : rows) ps.insert(r.p);
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.n < b.n; });
    for (const auto& r : sorted) {
      std::string series = "delta_max";
      if (ps.size() > 1) series += " p=" + std::to_string(r.p);
      body << r.n << ',' << series << ',' << csv_field(r.max_delta) << ",,\n";
    }
  } else {
    const auto rows = gramcov::io::read_results_csv(in);
    if (rows.empty()) {
      std::cerr << "error: no data rows in '" << opts.results << "'\n";
      return kExitUsage;
    }
    std::set<std::size_t> ns;
    std::set<std::size_t> ps;
    for (const auto& r : rows) {
      ns.insert(r.n);
      ps.insert(r.p);
    }
    auto sorted = rows;
    if (opts.kind == "runtime-vs-n") {
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.n < b.n; });
      for (const auto& r : sorted) {
        std::string series = r.method;
        if (ps.size() > 1) series += " p=" + std::to_string(r.p);
        body << r.n << ',' << series << ',' << csv_field(r.trimmed_mean_s)
             << ',' << csv_field(r.band_lo_s) << ',' << csv_field(r.band_hi_s)
             << '\n';
      }
    } else if (opts.kind == "runtime-vs-p") {
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.p < b.p; });
      for (const auto& r : sorted) {
        std::string series = r.method;
        if (ns.size() > 1) series += " n=" + std::to_string(r.n);
        body << r.p << ',' << series << ',' << csv_field(r.trimmed_mean_s)
             << ',' << csv_field(r.band_lo_s) << ',' << csv_field(r.band_hi_s)
             << '\n';
      }
    } else {  // ratio
      std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>>
          cells;  // (n,p) -> (bariance mean, centered mean)
      for (const auto& r : sorted) {
        if (r.method == "bariance") cells[{r.n, r.p}].first = r.trimmed_mean_s;
        if (r.method == "centered") cells[{r.n, r.p}].second = r.trimmed_mean_s;
      }
      bool any = false;
      for (const auto& [key, means] : cells) {
        if (means.first <= 0.0 || means.second <= 0.0) continue;
        std::string series = "centered/bariance";
        if (ps.size() > 1) series += " p=" + std::to_string(key.second);
        body << key.first << ',' << series << ','
             << csv_field(means.second / means.first) << ",,\n";
        any = true;
      }
      if (!any) {
        std::cerr << "error: need both bariance and centered rows for ratios\n";
        return kExitUsage;
      }
    }
  }

  return with_output(opts.output, [&](std::ostream& out) {
    out << gramcov::io::kPlotHeader << '\n' << body.str();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covariance via the Gram identity: estimators, equivalence "
               "verification and a timing harness"};
  app.require_subcommand(1);

  CovOpts cov_opts;
  auto* cov_cmd = app.add_subcommand("cov", "covariance of a matrix file");
  cov_cmd->add_option("--in", cov_opts.input, "input matrix (CSV or GCOV1 binary)")
      ->required();
  cov_cmd->add_option("--method", cov_opts.method, "estimator")
      ->check(CLI::IsMember({"bariance", "centered", "bruteforce"}));
  cov_cmd->add_option("--weights", cov_opts.weights_path,
                      "one-column integer CSV of resample multiplicities");
  cov_cmd->add_option("--out", cov_opts.output, "output CSV (default stdout)");

  VerifyOpts verify_opts;
  verify_opts.seed = default_seed();
  auto* verify_cmd = app.add_subcommand(
      "verify", "max entrywise deviation between the Gram-identity and "
                "centered paths over a size grid");
  verify_cmd->add_option("--n", verify_opts.n_values, "row counts (repeatable)");
  verify_cmd->add_option("--p", verify_opts.p_values, "column counts (repeatable)");
  verify_cmd->add_option("--draws", verify_opts.draws, "draws per size");
  verify_cmd->add_option("--seed", verify_opts.seed, "RNG seed");
  verify_cmd->add_option("--out", verify_opts.output, "also write the table as CSV");

  BenchOpts bench_opts;
  bench_opts.seed = default_seed();
  auto* bench_cmd = app.add_subcommand("bench", "timing protocol with warm-up, "
                                                "IQR trimming and bootstrap bands");
  bench_cmd->add_option("--n", bench_opts.n_values, "row counts (repeatable)");
  bench_cmd->add_option("--p", bench_opts.p_values, "column counts (repeatable)");
  bench_cmd->add_option("--reps", bench_opts.reps, "timed repetitions");
  bench_cmd->add_option("--warmup", bench_opts.warmup, "warm-up calls");
  bench_cmd->add_option("--boot", bench_opts.boot, "bootstrap replicates");
  bench_cmd->add_option("--seed", bench_opts.seed, "RNG seed");
  bench_cmd->add_option("--methods", bench_opts.methods,
                        "methods to time (bariance, centered, external-baseline)")
      ->delimiter(',');
  bench_cmd->add_option("--out", bench_opts.output, "results CSV path");

  StreamOpts stream_opts;
  auto* stream_cmd = app.add_subcommand("stream", "feed rows one at a time and "
                                                  "print the running covariance");
  stream_cmd->add_option("--in", stream_opts.input, "input matrix file")->required();
  stream_cmd->add_option("--shift", stream_opts.shift, "numerical anchor")
      ->check(CLI::IsMember({"none", "first-row"}));
  stream_cmd->add_option("--emit-every", stream_opts.emit_every,
                         "also print at t = k, 2k, ...");

  PlotOpts plot_opts;
  auto* plot_cmd = app.add_subcommand("plotdata", "tidy per-figure CSV from a "
                                                  "results file");
  plot_cmd->add_option("--results", plot_opts.results, "results CSV")->required();
  plot_cmd->add_option("--kind", plot_opts.kind, "figure kind")
      ->required()
      ->check(CLI::IsMember({"runtime-vs-n", "runtime-vs-p", "ratio", "error"}));
  plot_cmd->add_option("--out", plot_opts.output, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cov_cmd) return run_cov(cov_opts);
    if (*verify_cmd) return run_verify(verify_opts);
    if (*bench_cmd) return run_bench(bench_opts);
    if (*stream_cmd) return run_stream(stream_opts);
    if (*plot_cmd) return run_plotdata(plot_opts);
  } catch (const gramcov::io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
