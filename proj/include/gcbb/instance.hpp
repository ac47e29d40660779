#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace gcbb {

using Vertex = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Unordered edge, always stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Complete Euclidean graph. Immutable after construction; costs are exact
// (unrounded) L2 distances stored as a dense symmetric matrix.
class Instance {
 public:
  Instance(std::vector<Point> coords, std::string name = {});

  int size() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }
  std::span<const Point> coords() const noexcept { return coords_; }

  double cost(Vertex i, Vertex j) const noexcept {
    return dist_[static_cast<std::size_t>(i) * n_ + j];
  }
  double cost(const Edge& e) const noexcept { return cost(e.u, e.v); }
  std::span<const double> cost_row(Vertex i) const noexcept {
    return {dist_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  std::size_t edge_count() const noexcept {
    return static_cast<std::size_t>(n_) * (n_ - 1) / 2;
  }
  // Rank of e in lexicographic (u, v) order; the library-wide tie-break.
  std::size_t edge_index(const Edge& e) const noexcept {
    const std::size_t u = e.u;
    return u * n_ - u * (u + 1) / 2 + (e.v - e.u - 1);
  }

 private:
  int n_;
  std::string name_;
  std::vector<Point> coords_;
  std::vector<double> dist_;
};

struct Tour {
  std::vector<Vertex> order;
  double length = 0.0;

  std::vector<Edge> edges() const;
};

// Sum of consecutive costs along order, closing the cycle.
double tour_length(const Instance& inst, std::span<const Vertex> order);
Tour make_tour(const Instance& inst, std::vector<Vertex> order);

// n points i.i.d. uniform on the unit square.
Instance generate(int n, std::uint64_t seed);

// TSPLIB subset: NAME, TYPE, COMMENT, DIMENSION, EDGE_WEIGHT_TYPE (EUC_2D
// only), NODE_COORD_SECTION, EOF. Indices are 1-based on disk.
Instance parse_tsplib(std::istream& in);
Instance parse_tsplib_file(const std::string& path);
void write_tsplib(std::ostream& out, const Instance& inst);

bool validate_tour(const Instance& inst, const Tour& tour);

inline constexpr int kBruteForceMaxN = 12;

// Exhaustive enumeration with vertex 0 first. Test oracle only.
Tour brute_force_optimum(const Instance& inst);

}  // namespace gcbb
