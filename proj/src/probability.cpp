#include "gcbb/probability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gcbb/error.hpp"
#include "gcbb/random.hpp"

namespace gcbb {

namespace {

constexpr double kRangeSlack = 1e-9;
constexpr double kSymmetrySlack = 1e-6;

std::string pos(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace

ProbabilityMatrix::ProbabilityMatrix(int n, std::vector<double> values)
    : n_(n), p_(std::move(values)) {
  if (n < 1 || p_.size() != static_cast<std::size_t>(n) * n) {
    throw Error(ErrorKind::input, "matrix holds " + std::to_string(p_.size()) +
                                      " entries, expected " + std::to_string(n) + "x" +
                                      std::to_string(n));
  }
  const auto at = [&](int i, int j) -> double& { return p_[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double& v = at(i, j);
      if (!std::isfinite(v) || v < -kRangeSlack || v > 1.0 + kRangeSlack) {
        throw Error(ErrorKind::input, "entry " + pos(i, j) + " out of range [0,1]");
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  for (int i = 0; i < n; ++i) {
    at(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double a = at(i, j);
      const double b = at(j, i);
      if (std::abs(a - b) > kSymmetrySlack) {
        throw Error(ErrorKind::input, "asymmetric entries at " + pos(i, j));
      }
      if (a != b) at(i, j) = at(j, i) = 0.5 * (a + b);
    }
  }
}

OptimalityScore expected_optimality(std::span<const Edge> edges, const ProbabilityMatrix& p) {
  OptimalityScore s;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v >= p.size()) {
      throw Error(ErrorKind::input, "edge outside a " + std::to_string(p.size()) + "-vertex matrix");
    }
    s.value += p(e);
  }
  s.normalized = s.value / static_cast<double>(p.size());
  return s;
}

ProbabilityMatrix load_matrix(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<double> values;
  int rows = 0;
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::input, "line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    if (n < 0) {
      if (!(row >> n) || n < 1) fail("expected a positive dimension");
      values.reserve(static_cast<std::size_t>(n) * n);
      continue;
    }
    if (rows == n) fail("more than " + std::to_string(n) + " rows");
    std::string tok;
    int cols = 0;
    while (row >> tok) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("non-numeric entry '" + tok + "'");
      values.push_back(v);
      ++cols;
    }
    if (cols != n) {
      fail("row has " + std::to_string(cols) + " entries, expected " + std::to_string(n));
    }
    ++rows;
  }
  if (n < 0) throw Error(ErrorKind::input, "empty probability file");
  if (rows != n) {
    throw Error(ErrorKind::input, "expected " + std::to_string(n) + " rows, found " + std::to_string(rows));
  }
  return ProbabilityMatrix(n, std::move(values));
}

ProbabilityMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
  return load_matrix(in);
}

void write_matrix(std::ostream& out, const ProbabilityMatrix& p) {
  const int n = p.size();
  out << n << '\n';
  char buf[64];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p(i, j));
      if (j > 0) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const ProbabilityMatrix& p) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, "cannot write '" + path + "'");
  write_matrix(out, p);
}

ProbabilityMatrix oracle_matrix(const Instance& inst) {
  const Tour best = brute_force_optimum(inst);
  const int n = inst.size();
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (const Edge& e : best.edges()) {
    v[static_cast<std::size_t>(e.u) * n + e.v] = 1.0;
    v[static_cast<std::size_t>(e.v) * n + e.u] = 1.0;
  }
  return ProbabilityMatrix(n, std::move(v));
}

ProbabilityMatrix noisy_oracle_matrix(const Instance& inst, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise <= 0.5)) {
    throw Error(ErrorKind::input, "noise must lie in [0, 0.5]");
  }
  const ProbabilityMatrix oracle = oracle_matrix(inst);
  const int n = inst.size();
  std::vector<double> v(oracle.values().begin(), oracle.values().end());
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double u = rng.uniform01();
      const double p = oracle(i, j) == 1.0 ? 1.0 - u * noise : u * noise;
      v[static_cast<std::size_t>(i) * n + j] = p;
      v[static_cast<std::size_t>(j) * n + i] = p;
    }
  }
  return ProbabilityMatrix(n, std::move(v));
}

ProbabilityMatrix uniform_matrix(int n, double value) {
  return ProbabilityMatrix(n, std::vector<double>(static_cast<std::size_t>(n) * n, value));
}

ProbabilityMatrix inverted(const ProbabilityMatrix& p) {
  const int n = p.size();
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = i == j ? 0.0 : 1.0 - p(i, j);
  }
  return ProbabilityMatrix(n, std::move(v));
}

}  // namespace gcbb
