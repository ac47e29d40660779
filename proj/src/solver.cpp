#include "gcbb/solver.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "gcbb/error.hpp"

namespace gcbb {

void SolverConfig::validate() const {
  if (!(time_limit > 0.0)) throw Error(ErrorKind::config, "time limit must be positive");
  if (tie_eps && !(*tie_eps >= 0.0)) throw Error(ErrorKind::config, "tie_eps must be >= 0");
  if (root_iters && *root_iters < 1) throw Error(ErrorKind::config, "root_iters must be >= 1");
  if (node_iters && *node_iters < 1) throw Error(ErrorKind::config, "node_iters must be >= 1");
  if (!(prune_eps >= 0.0)) throw Error(ErrorKind::config, "prune_eps must be >= 0");
  if (!(step_decay > 0.0 && step_decay <= 1.0)) throw Error(ErrorKind::config, "step_decay must be in (0, 1]");
}

std::strong_ordering compare_nodes(const BBNode& a, const BBNode& b, Mode mode, double tie_eps) {
  if (mode == Mode::gcbb && std::abs(a.lb - b.lb) <= tie_eps) {
    if (a.expected_score != b.expected_score) {
      return a.expected_score > b.expected_score ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.id <=> b.id;
  }
  if (a.lb != b.lb) return a.lb < b.lb ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.id <=> b.id;
}

std::array<ChildNode, 2> child_nodes(const Instance& inst, const BBNode& parent, const Edge& edge,
                                     const ChildContext& ctx, std::uint64_t first_id) {
  std::array<ChildNode, 2> kids;
  for (int k = 0; k < 2; ++k) {
    ChildNode& c = kids[static_cast<std::size_t>(k)];
    c.node.state = parent.state;
    c.node.pi = parent.pi;
    c.node.depth = parent.depth + 1;
    c.node.id = first_id + static_cast<std::uint64_t>(k);
    c.node.parent_lb = parent.lb;
    c.node.lb = parent.lb;
    const bool decided = k == 0 ? c.node.state.force(edge) : c.node.state.forbid(edge);
    if (!decided) continue;
    c.tree = build_one_tree(inst, c.node.state, c.node.pi, ctx.root);
    if (!c.tree) continue;
    c.feasible = true;
    c.node.lb = c.tree->lagrangian_cost;
    if (ctx.mode == Mode::gcbb && ctx.probs != nullptr) {
      c.node.expected_score = expected_optimality(c.tree->edges(), *ctx.probs).value;
    }
  }
  return kids;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Open list keyed by (lb, id). gcbb selection scans the tie window above the
// minimum bound and takes the highest E[O_T] there, lowest id on ties.
class OpenList {
 public:
  OpenList(Mode mode, double tie_eps) : mode_(mode), tie_eps_(tie_eps) {}

  bool empty() const { return order_.empty(); }
  std::size_t size() const { return order_.size(); }

  void push(BBNode node) {
    order_.emplace(node.lb, node.id);
    const std::uint64_t id = node.id;
    nodes_.emplace(id, std::move(node));
  }

  BBNode pop() {
    auto pick = order_.begin();
    if (mode_ == Mode::gcbb) {
      const double limit = pick->first + tie_eps_;
      const BBNode* best = &nodes_.at(pick->second);
      for (auto it = std::next(pick); it != order_.end() && it->first <= limit; ++it) {
        const BBNode& cand = nodes_.at(it->second);
        if (cand.expected_score > best->expected_score ||
            (cand.expected_score == best->expected_score && cand.id < best->id)) {
          best = &cand;
          pick = it;
        }
      }
    }
    auto node_it = nodes_.find(pick->second);
    BBNode out = std::move(node_it->second);
    nodes_.erase(node_it);
    order_.erase(pick);
    return out;
  }

 private:
  Mode mode_;
  double tie_eps_;
  std::set<std::pair<double, std::uint64_t>> order_;
  std::map<std::uint64_t, BBNode> nodes_;
};

}  // namespace

SolveReport solve(const Instance& inst, const ProbabilityMatrix* probs, const SolverConfig& cfg,
                  const NodeObserver& observer) {
  cfg.validate();
  if (cfg.mode == Mode::gcbb && probs == nullptr) {
    throw Error(ErrorKind::config, "gcbb mode needs a probability matrix");
  }
  if (probs != nullptr && probs->size() != inst.size()) {
    throw Error(ErrorKind::input, "probability matrix dimension " + std::to_string(probs->size()) +
                                      " does not match instance size " + std::to_string(inst.size()));
  }
  const ProbabilityMatrix* guide = cfg.mode == Mode::gcbb ? probs : nullptr;
  const int n = inst.size();
  const double eps = cfg.prune_eps;
  const auto t0 = Clock::now();

  SolveReport rep;
  rep.n = n;
  rep.mode = cfg.mode;
  rep.seed = cfg.seed;

  InitialTour init = initial_incumbent(inst, guide, cfg.mode);
  rep.optimum = std::move(init.tour);
  rep.incumbent_source = init.source;
  rep.optimum_source = init.source;
  rep.incumbent_trajectory.push_back({seconds_since(t0), rep.optimum.length});

  const auto bb0 = Clock::now();
  double found_at = 0.0;

  const auto offer = [&](const OneTree& tree, int depth) {
    auto tour = tree.to_tour(inst);
    if (!tour || !(tour->length < rep.optimum.length - eps)) return;
    rep.optimum = std::move(*tour);
    rep.optimum_source = TourSource::bb;
    rep.opt_depth = depth;
    rep.nodes_before_opt = rep.generated_nodes;
    found_at = seconds_since(bb0);
    rep.incumbent_trajectory.push_back({seconds_since(t0), rep.optimum.length});
  };

  const EdgeState empty_state(n);
  auto choice = select_root(inst, empty_state, guide, cfg.mode, eps);
  if (!choice) throw Error(ErrorKind::invalid_instance, "instance admits no 1-tree");
  const Vertex root = choice->root;
  rep.root = root;
  rep.root_lb = choice->tree.lagrangian_cost;
  const double tie_eps = cfg.tie_eps.value_or(kDefaultTieEpsRelative * std::abs(rep.root_lb));
  rep.tie_eps = tie_eps;

  AscentParams params;
  params.initial_step = default_initial_step(rep.root_lb, n);
  params.decay = cfg.step_decay;
  params.prune_eps = eps;
  const int root_iters = cfg.root_iters.value_or(5 * n);
  const int node_iters = cfg.node_iters.value_or(n);
  const ChildContext ctx{root, guide, cfg.mode};

  OpenList open(cfg.mode, tie_eps);
  {
    BBNode node;
    node.state = empty_state;
    node.pi.assign(static_cast<std::size_t>(n), 0.0);
    node.lb = rep.root_lb;
    if (guide != nullptr) node.expected_score = expected_optimality(choice->tree.edges(), *guide).value;
    open.push(std::move(node));
    rep.generated_nodes = 1;
  }
  std::uint64_t next_id = 1;
  bool timed_out = false;

  const auto notify = [&](const BBNode& node, NodeOutcome outcome, const AscentResult* asc, double ub) {
    if (observer) observer(NodeEvent{node, outcome, asc, ub});
  };

  while (!open.empty()) {
    if (seconds_since(t0) > cfg.time_limit) {
      timed_out = true;
      break;
    }
    BBNode node = open.pop();
    const double ub = rep.optimum.length;
    if (node.lb >= ub - eps) {
      notify(node, NodeOutcome::pruned_at_pop, nullptr, ub);
      continue;
    }

    params.iters = node.depth == 0 ? root_iters : node_iters;
    auto asc = subgradient_ascent(inst, node.state, root, node.pi, params, ub);
    if (!asc) {
      notify(node, NodeOutcome::infeasible, nullptr, ub);
      continue;
    }
    if (asc->found_tour) {
      offer(asc->tree, node.depth);
      notify(node, NodeOutcome::tour, &*asc, ub);
      continue;
    }
    const double lb = asc->lagrange.best_lb;
    if (lb >= ub - eps) {
      notify(node, NodeOutcome::pruned_by_bound, &*asc, ub);
      continue;
    }

    BBNode parent;
    parent.state = std::move(node.state);
    if (cfg.edge_fixing) {
      FixResult fixed = fix_edges(inst, parent.state, asc->tree, asc->lagrange.pi, lb, ub, eps);
      if (fixed.infeasible) {
        node.state = std::move(parent.state);
        notify(node, NodeOutcome::fixing_infeasible, &*asc, ub);
        continue;
      }
      parent.state = std::move(fixed.state);
    }
    const auto edge = choose_branch_edge(inst, asc->scores, parent.state, asc->tree,
                                         asc->lagrange.pi, guide, cfg.mode);
    if (!edge) {
      node.state = std::move(parent.state);
      notify(node, NodeOutcome::exhausted, &*asc, ub);
      continue;
    }

    ++rep.explored_nodes;
    parent.lb = lb;
    parent.pi = asc->lagrange.pi;
    parent.depth = node.depth;
    parent.id = node.id;
    parent.parent_lb = node.parent_lb;
    auto kids = child_nodes(inst, parent, *edge, ctx, next_id);
    next_id += 2;
    rep.generated_nodes += 2;
    rep.tree_depth = std::max(rep.tree_depth, parent.depth + 1);
    notify(parent, NodeOutcome::branched, &*asc, ub);

    for (ChildNode& kid : kids) {
      if (!kid.feasible) continue;
      if (kid.tree->is_tour()) {
        offer(*kid.tree, kid.node.depth);
        continue;
      }
      if (kid.node.lb >= rep.optimum.length - eps) continue;
      open.push(std::move(kid.node));
    }
  }

  rep.total_time = seconds_since(t0);
  rep.bb_time = std::min(seconds_since(bb0), rep.total_time);
  rep.time_to_best = rep.optimum_source == TourSource::bb ? std::min(found_at, rep.bb_time) : 0.0;
  rep.solved = !timed_out && rep.total_time <= cfg.time_limit;
  if (guide != nullptr) {
    rep.opt_score_normalized = expected_optimality(rep.optimum.edges(), *guide).normalized;
  }
  return rep;
}

}  // namespace gcbb
