#pragma once

// Best-first 1-tree branch and bound. In gcbb mode the probability matrix
// only reorders the search (root choice, initial tour, branching ties, open
// node selection); it never changes the optimum that is proven.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gcbb/heuristics.hpp"
#include "gcbb/instance.hpp"
#include "gcbb/mode.hpp"
#include "gcbb/onetree.hpp"
#include "gcbb/probability.hpp"

namespace gcbb {

struct SolverConfig {
  Mode mode = Mode::classic;
  double time_limit = 600.0;  // seconds
  // Open-node tie window for gcbb ordering; unset means 1e-3 * root bound.
  std::optional<double> tie_eps;
  std::optional<int> root_iters;  // default 5n
  std::optional<int> node_iters;  // default n
  std::uint64_t seed = 0;         // recorded in the report only
  double prune_eps = kDefaultPruneEps;
  double step_decay = 0.95;
  bool edge_fixing = true;

  // Throws Error(config) on a bad combination.
  void validate() const;
};

inline constexpr double kDefaultTieEpsRelative = 1e-3;

struct BBNode {
  EdgeState state;
  double lb = 0.0;
  std::vector<double> pi;
  int depth = 0;
  double expected_score = 0.0;
  std::uint64_t id = 0;
  double parent_lb = -std::numeric_limits<double>::infinity();
};

// less: a is explored before b.
std::strong_ordering compare_nodes(const BBNode& a, const BBNode& b, Mode mode, double tie_eps);

struct ChildContext {
  Vertex root = 0;
  const ProbabilityMatrix* probs = nullptr;
  Mode mode = Mode::classic;
};

struct ChildNode {
  BBNode node;
  bool feasible = false;
  std::optional<OneTree> tree;  // 1-tree under the inherited multipliers
};

// [0] forces `edge`, [1] forbids it. Ids are first_id and first_id + 1.
// Each child's lb and E[O_T] come from one 1-tree under the parent's pi;
// an infeasible child is returned with feasible = false.
std::array<ChildNode, 2> child_nodes(const Instance& inst, const BBNode& parent, const Edge& edge,
                                     const ChildContext& ctx, std::uint64_t first_id);

struct TrajectoryPoint {
  double time = 0.0;  // seconds since the start of solve
  double length = 0.0;
};

struct SolveReport {
  int n = 0;
  Mode mode = Mode::classic;
  std::uint64_t seed = 0;
  int instance_index = 0;

  bool solved = false;
  Tour optimum;  // best tour found; proven optimal when solved
  double total_time = 0.0;
  double bb_time = 0.0;
  double time_to_best = 0.0;
  int tree_depth = 0;
  int opt_depth = 0;
  std::uint64_t generated_nodes = 0;
  std::uint64_t explored_nodes = 0;
  std::uint64_t nodes_before_opt = 0;
  TourSource incumbent_source = TourSource::nn;  // initial tour
  TourSource optimum_source = TourSource::nn;    // what produced the final tour
  std::optional<double> opt_score_normalized;
  std::vector<TrajectoryPoint> incumbent_trajectory;

  Vertex root = 0;
  double root_lb = 0.0;
  double tie_eps = 0.0;
};

enum class NodeOutcome {
  pruned_at_pop,   // bound already at or above the incumbent
  infeasible,
  tour,            // relaxation produced a tour
  pruned_by_bound,
  fixing_infeasible,
  exhausted,       // nothing left to branch on
  branched,
};

struct NodeEvent {
  const BBNode& node;
  NodeOutcome outcome;
  const AscentResult* ascent;  // null when no ascent ran
  double incumbent;            // upper bound when the node was processed
};

using NodeObserver = std::function<void(const NodeEvent&)>;

SolveReport solve(const Instance& inst, const ProbabilityMatrix* probs, const SolverConfig& cfg,
                  const NodeObserver& observer = {});

}  // namespace gcbb
