#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gcbb/instance.hpp"

namespace gcbb {

// Symmetric n x n edge probabilities with a zero diagonal.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix() = default;
  // Validates symmetry, range and diagonal; throws Error(input) otherwise.
  ProbabilityMatrix(int n, std::vector<double> values);

  int size() const noexcept { return n_; }
  double operator()(Vertex i, Vertex j) const noexcept {
    return p_[static_cast<std::size_t>(i) * n_ + j];
  }
  double operator()(const Edge& e) const noexcept { return (*this)(e.u, e.v); }
  std::span<const double> values() const noexcept { return p_; }

 private:
  int n_ = 0;
  std::vector<double> p_;
};

struct OptimalityScore {
  double value = 0.0;       // expected number of optimal-tour edges among the n edges
  double normalized = 0.0;  // value / n
};

// Sum of p_e over the edges of a 1-tree (or a tour, which is a 1-tree).
OptimalityScore expected_optimality(std::span<const Edge> edges, const ProbabilityMatrix& p);

// Text format: first non-comment line is n, then n rows of n reals. Lines
// starting with '#' are comments.
ProbabilityMatrix load_matrix(std::istream& in);
ProbabilityMatrix load_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const ProbabilityMatrix& p);
void write_matrix_file(const std::string& path, const ProbabilityMatrix& p);

// 1 on the edges of brute_force_optimum(inst), 0 elsewhere.
ProbabilityMatrix oracle_matrix(const Instance& inst);
// Oracle entries pulled towards the middle by u * noise, u ~ U[0, 1).
ProbabilityMatrix noisy_oracle_matrix(const Instance& inst, double noise, std::uint64_t seed);
ProbabilityMatrix uniform_matrix(int n, double value);
// 1 - p off the diagonal.
ProbabilityMatrix inverted(const ProbabilityMatrix& p);

}  // namespace gcbb
