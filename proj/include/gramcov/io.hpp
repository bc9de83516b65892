#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramcov/bench.hpp"
#include "gramcov/matrix.hpp"

namespace gramcov::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kBinaryMagic = "GCOV1";
inline constexpr std::string_view kResultsHeader =
    "method,n,p,repetitions,kept,removed,trimmed_mean_s,band_lo_s,band_hi_s,seed";
inline constexpr std::string_view kVerifyHeader = "n,p,draws,max_delta,seed";
inline constexpr std::string_view kPlotHeader = "x,series,y,y_lo,y_hi";

/// 17 significant digits; enough for any binary64 value to survive a
/// decimal round trip exactly.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

inline bool try_parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), last, out);
  return ec == std::errc() && ptr == last;
}

inline bool try_parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), last, out);
  return ec == std::errc() && ptr == last;
}

inline double parse_real_field(std::string_view s, std::string_view what) {
  double v;
  if (!try_parse_real(s, v)) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_u64_field(std::string_view s, std::string_view what) {
  std::uint64_t v;
  if (!try_parse_u64(s, v)) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

/// Comma-separated reals, one observation per row, optional single header
/// row (detected as a first line with any non-numeric cell). Ragged rows
/// and non-finite values are rejected.
inline DenseMatrix read_matrix_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool saw_content = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (trim(sv).empty()) continue;
    const auto fields = split_fields(sv);
    if (!saw_content) {
      saw_content = true;
      cols = fields.size();
      bool numeric = true;
      double tmp;
      for (const auto f : fields) {
        if (!try_parse_real(f, tmp)) {
          numeric = false;
          break;
        }
      }
      if (!numeric) continue;  // header row
    }
    if (fields.size() != cols) {
      throw ParseError("ragged CSV row " + std::to_string(rows + 1));
    }
    for (const auto f : fields) {
      double v;
      if (!try_parse_real(f, v)) {
        throw ParseError("invalid real value '" + std::string(f) + "'");
      }
      if (!std::isfinite(v)) {
        throw ParseError("non-finite value rejected");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (!saw_content) throw ParseError("empty input");
  return DenseMatrix(rows, cols, std::move(values));
}

inline void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < m.cols(); ++k) {
      out << format_real(m(i, k));
      out << (k + 1 < m.cols() ? ',' : '\n');
    }
  }
}

inline void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes, 8);
}

inline std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw ParseError("truncated binary matrix");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return v;
}

/// Magic "GCOV1", then u64 LE rows, u64 LE cols, then rows*cols IEEE 754
/// binary64 values, little-endian, row-major.
inline void write_matrix_binary(std::ostream& out, const DenseMatrix& m) {
  out.write(kBinaryMagic.data(),
            static_cast<std::streamsize>(kBinaryMagic.size()));
  put_u64_le(out, m.rows());
  put_u64_le(out, m.cols());
  for (double v : m.data()) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  }
}

inline DenseMatrix read_matrix_binary(std::istream& in) {
  char magic[5];
  in.read(magic, 5);
  if (!in || std::string_view(magic, 5) != kBinaryMagic) {
    throw ParseError("bad magic; not a GCOV1 matrix");
  }
  const std::uint64_t n = get_u64_le(in);
  const std::uint64_t p = get_u64_le(in);
  if (p != 0 && n > (std::uint64_t{1} << 40) / p) {
    throw ParseError("matrix dimensions out of range");
  }
  std::vector<double> values;
  values.reserve(n * p);
  for (std::uint64_t i = 0; i < n * p; ++i) {
    const double v = std::bit_cast<double>(get_u64_le(in));
    if (!std::isfinite(v)) throw ParseError("non-finite value rejected");
    values.push_back(v);
  }
  return DenseMatrix(n, p, std::move(values));
}

/// Reads either format, sniffing the binary magic.
inline DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  char magic[5] = {};
  in.read(magic, 5);
  const bool is_binary =
      in.gcount() == 5 && std::string_view(magic, 5) == kBinaryMagic;
  in.clear();
  in.seekg(0);
  return is_binary ? read_matrix_binary(in) : read_matrix_csv(in);
}

inline void write_matrix_file_csv(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_matrix_csv(out, m);
}

/// One-column CSV of nonnegative integer multiplicities, no header.
inline std::vector<std::uint64_t> read_weights_csv(std::istream& in) {
  std::vector<std::uint64_t> weights;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    sv = trim(sv);
    if (sv.empty()) continue;
    if (sv.find(',') != std::string_view::npos) {
      throw ParseError("weights file must have exactly one column");
    }
    weights.push_back(parse_u64_field(sv, "weight"));
  }
  if (weights.empty()) throw ParseError("empty weights file");
  return weights;
}

struct ResultsRow {
  std::string method;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t repetitions = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
  double trimmed_mean_s = 0.0;
  double band_lo_s = 0.0;
  double band_hi_s = 0.0;
  std::uint64_t seed = 0;
};

inline void write_results_csv(std::ostream& out,
                              std::span<const BenchSummary> summaries,
                              std::uint64_t seed) {
  out << kResultsHeader << '\n';
  for (const BenchSummary& s : summaries) {
    if (s.skipped) continue;
    out << method_name(s.method) << ',' << s.n << ',' << s.p << ','
        << s.repetitions << ',' << s.kept_count << ',' << s.removed_count << ','
        << format_real(s.trimmed_mean_s) << ',' << format_real(s.band_lo_s)
        << ',' << format_real(s.band_hi_s) << ',' << seed << '\n';
  }
}

inline std::vector<ResultsRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty results file");
  std::string_view header = line;
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header != kResultsHeader) throw ParseError("unexpected results header");
  std::vector<ResultsRow> rows;
  while (std::getline(in, line)) {
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (trim(sv).empty()) continue;
    const auto f = split_fields(sv);
    if (f.size() != 10) throw ParseError("malformed results row");
    ResultsRow row;
    row.method = std::string(f[0]);
    row.n = parse_u64_field(f[1], "n");
    row.p = parse_u64_field(f[2], "p");
    row.repetitions = parse_u64_field(f[3], "repetitions");
    row.kept = parse_u64_field(f[4], "kept");
    row.removed = parse_u64_field(f[5], "removed");
    row.trimmed_mean_s = parse_real_field(f[6], "trimmed_mean_s");
    row.band_lo_s = parse_real_field(f[7], "band_lo_s");
    row.band_hi_s = parse_real_field(f[8], "band_hi_s");
    row.seed = parse_u64_field(f[9], "seed");
    rows.push_back(row);
  }
  return rows;
}

struct VerifyRow {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t draws = 0;
  double max_delta = 0.0;
  std::uint64_t seed = 0;
};

inline void write_verify_csv(std::ostream& out,
                             std::span<const EquivalenceReport> reports,
                             std::size_t draws, std::uint64_t seed) {
  out << kVerifyHeader << '\n';
  for (const EquivalenceReport& r : reports) {
    out << r.n << ',' << r.p << ',' << draws << ',' << format_real(r.delta_max)
        << ',' << seed << '\n';
  }
}

inline std::vector<VerifyRow> read_verify_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty verify file");
  std::string_view header = line;
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header != kVerifyHeader) throw ParseError("unexpected verify header");
  std::vector<VerifyRow> rows;
  while (std::getline(in, line)) {
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (trim(sv).empty()) continue;
    const auto f = split_fields(sv);
    if (f.size() != 5) throw ParseError("malformed verify row");
    VerifyRow row;
    row.n = parse_u64_field(f[0], "n");
    row.p = parse_u64_field(f[1], "p");
    row.draws = parse_u64_field(f[2], "draws");
    row.max_delta = parse_real_field(f[3], "max_delta");
    row.seed = parse_u64_field(f[4], "seed");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gramcov::io
