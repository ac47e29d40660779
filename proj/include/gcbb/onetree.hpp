#pragma once

// Held-Karp 1-tree relaxation: constrained 1-trees, root choice, subgradient
// ascent on the degree multipliers, reduced-cost edge fixing and the
// fractional branching scores collected during the ascent.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gcbb/instance.hpp"
#include "gcbb/mode.hpp"
#include "gcbb/probability.hpp"

namespace gcbb {

inline constexpr double kDefaultPruneEps = 1e-9;

enum class EdgeStatus : std::uint8_t { free = 0, forced = 1, forbidden = 2 };

// Branching decisions on the edges of the complete graph. A vertex with two
// forced edges is saturated: its remaining free edges are inadmissible.
class EdgeState {
 public:
  EdgeState() = default;
  explicit EdgeState(int n);

  int size() const noexcept { return n_; }

  // Two bits per unordered edge, indexed in lexicographic (u, v) order.
  EdgeStatus status(Vertex i, Vertex j) const noexcept {
    const std::size_t k = index(i < j ? i : j, i < j ? j : i);
    return static_cast<EdgeStatus>((bits_[k >> 2] >> ((k & 3) * 2)) & 3u);
  }
  EdgeStatus status(const Edge& e) const noexcept { return status(e.u, e.v); }
  bool is_free(const Edge& e) const noexcept { return status(e) == EdgeStatus::free; }

  int forced_degree(Vertex v) const noexcept { return forced_degree_[static_cast<std::size_t>(v)]; }
  bool saturated(Vertex v) const noexcept { return forced_degree(v) >= 2; }

  // Usable by a 1-tree: forced, or free with neither endpoint saturated.
  bool admissible(const Edge& e) const noexcept {
    const EdgeStatus s = status(e);
    if (s == EdgeStatus::forced) return true;
    return s == EdgeStatus::free && !saturated(e.u) && !saturated(e.v);
  }
  // Free and still open to a branching decision.
  bool branchable(const Edge& e) const noexcept {
    return status(e) == EdgeStatus::free && !saturated(e.u) && !saturated(e.v);
  }

  // Returns false, leaving the state untouched, if either endpoint already
  // has two forced edges or the edge is not free.
  bool force(const Edge& e);
  // Returns false if the edge is not free.
  bool forbid(const Edge& e);

  std::size_t decided_count() const noexcept { return decided_; }
  std::vector<Edge> forced_edges() const;
  std::vector<Edge> forbidden_edges() const;

  // Every decision in `other` is also present here.
  bool extends(const EdgeState& other) const;

  friend bool operator==(const EdgeState&, const EdgeState&) = default;

 private:
  std::size_t index(Vertex u, Vertex v) const noexcept {
    const auto uu = static_cast<std::size_t>(u);
    return uu * static_cast<std::size_t>(n_) - uu * (uu + 1) / 2 + static_cast<std::size_t>(v - u - 1);
  }
  void set(const Edge& e, EdgeStatus s);

  int n_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> forced_degree_;
  std::size_t decided_ = 0;
};

struct OneTree {
  Vertex root = 0;
  std::vector<Edge> tree_edges;  // spanning tree of V \ {root}, n - 2 edges
  std::array<Edge, 2> root_edges{};
  double lagrangian_cost = 0.0;
  std::vector<std::int32_t> degrees;

  bool is_tour() const;
  std::vector<Edge> edges() const;
  // Cycle order starting at root; only meaningful when is_tour().
  std::optional<Tour> to_tour(const Instance& inst) const;
};

// c_ij + pi_i + pi_j, evaluated with the same operation order as the kernels.
inline double reduced_cost(const Instance& inst, std::span<const double> pi, const Edge& e) {
  return (inst.cost(e) + pi[static_cast<std::size_t>(e.u)]) + pi[static_cast<std::size_t>(e.v)];
}

// Minimum 1-tree under reduced costs: Kruskal on V \ {root} seeded with the
// forced edges, ties by edge index, plus the two cheapest admissible root
// edges (forced root edges first). nullopt when the subproblem admits no
// 1-tree (disconnected, forced cycle, or < 2 root edges).
std::optional<OneTree> build_one_tree(const Instance& inst, const EdgeState& state,
                                      std::span<const double> pi, Vertex root);

struct RootChoice {
  Vertex root = 0;
  OneTree tree;
};

// Root whose pi = 0 1-tree has the largest cost. Candidates within tie_eps
// of the best are resolved by highest E[O_T] (gcbb) or lowest index.
std::optional<RootChoice> select_root(const Instance& inst, const EdgeState& state,
                                      const ProbabilityMatrix* probs, Mode mode,
                                      double tie_eps = kDefaultPruneEps);

// Appearance counts of each edge over the trailing window of ascent
// iterations; score = count / window.
class FractionalScores {
 public:
  FractionalScores() = default;
  explicit FractionalScores(const Instance& inst);
  // Direct construction from dense per-edge-index counts.
  FractionalScores(int n, std::vector<std::uint32_t> counts, std::uint32_t window);

  void add(const Instance& inst, const OneTree& tree);

  std::uint32_t window() const noexcept { return window_; }
  std::uint32_t count(std::size_t edge_index) const noexcept { return counts_[edge_index]; }
  double score(std::size_t edge_index) const noexcept {
    return window_ == 0 ? 0.0 : static_cast<double>(counts_[edge_index]) / window_;
  }
  std::size_t edge_count() const noexcept { return counts_.size(); }

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t window_ = 0;
};

struct AscentParams {
  int iters = 1;
  double initial_step = 0.0;
  double decay = 0.95;
  double prune_eps = kDefaultPruneEps;
};

// Ascent step schedule start: root bound / (2n).
inline double default_initial_step(double root_bound, int n) {
  return root_bound / (2.0 * static_cast<double>(n));
}

struct LagrangeState {
  std::vector<double> pi;  // multipliers that produced the best bound
  double step = 0.0;
  double best_lb = -std::numeric_limits<double>::infinity();
  int iteration = 0;
};

struct AscentResult {
  LagrangeState lagrange;
  OneTree tree;  // attains best_lb
  FractionalScores scores;
  std::vector<double> bounds;          // 1-tree bound per iteration
  std::vector<double> best_lb_trace;   // running maximum per iteration
  bool found_tour = false;
  bool reached_ub = false;
};

// nullopt when the subproblem is infeasible.
std::optional<AscentResult> subgradient_ascent(const Instance& inst, const EdgeState& state,
                                               Vertex root, std::span<const double> init_pi,
                                               const AscentParams& params,
                                               double ub = std::numeric_limits<double>::infinity());

struct FixResult {
  EdgeState state;
  bool infeasible = false;
  std::size_t forbidden = 0;
  std::size_t forced = 0;
};

// Reduced-cost exchange fixing around a 1-tree of bound lb under pi.
// Non-tree edges whose cheapest exchange lifts the bound to ub - prune_eps
// are forbidden; tree edges whose cheapest replacement does so are forced.
// With ub = +inf nothing is fixed.
FixResult fix_edges(const Instance& inst, const EdgeState& state, const OneTree& tree,
                    std::span<const double> pi, double lb, double ub,
                    double prune_eps = kDefaultPruneEps);

// Free edge with score closest to 0.5; ties by lowest index (classic) or
// highest p_ij (gcbb). When every score is 0 or 1, the highest reduced-cost
// tree edge at a vertex of degree > 2. nullopt: nothing to branch on.
std::optional<Edge> choose_branch_edge(const Instance& inst, const FractionalScores& scores,
                                       const EdgeState& state, const OneTree& tree,
                                       std::span<const double> pi, const ProbabilityMatrix* probs,
                                       Mode mode);

}  // namespace gcbb
