#include "gcbb/onetree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "gcbb/kernels.hpp"

namespace gcbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // False when a and b were already connected.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

struct Candidate {
  double rc;
  std::size_t index;
  Edge edge;
};

bool cheaper(const Candidate& a, const Candidate& b) {
  if (a.rc != b.rc) return a.rc < b.rc;
  return a.index < b.index;
}

}  // namespace

// ---------------------------------------------------------------------------
// EdgeState

EdgeState::EdgeState(int n)
    : n_(n),
      bits_((static_cast<std::size_t>(n) * (n - 1) / 2 + 3) / 4, 0),
      forced_degree_(static_cast<std::size_t>(n), 0) {}

void EdgeState::set(const Edge& e, EdgeStatus s) {
  const std::size_t k = index(e.u, e.v);
  const unsigned shift = static_cast<unsigned>(k & 3) * 2;
  bits_[k >> 2] = static_cast<std::uint8_t>((bits_[k >> 2] & ~(3u << shift)) |
                                            (static_cast<unsigned>(s) << shift));
  ++decided_;
}

bool EdgeState::force(const Edge& e) {
  if (status(e) != EdgeStatus::free || saturated(e.u) || saturated(e.v)) return false;
  set(e, EdgeStatus::forced);
  ++forced_degree_[static_cast<std::size_t>(e.u)];
  ++forced_degree_[static_cast<std::size_t>(e.v)];
  return true;
}

bool EdgeState::forbid(const Edge& e) {
  if (status(e) != EdgeStatus::free) return false;
  set(e, EdgeStatus::forbidden);
  return true;
}

std::vector<Edge> EdgeState::forced_edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v = u + 1; v < n_; ++v)
      if (status(u, v) == EdgeStatus::forced) out.emplace_back(u, v);
  return out;
}

std::vector<Edge> EdgeState::forbidden_edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v = u + 1; v < n_; ++v)
      if (status(u, v) == EdgeStatus::forbidden) out.emplace_back(u, v);
  return out;
}

bool EdgeState::extends(const EdgeState& other) const {
  if (other.n_ != n_) return false;
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v = u + 1; v < n_; ++v) {
      const EdgeStatus s = other.status(u, v);
      if (s != EdgeStatus::free && s != status(u, v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// OneTree

bool OneTree::is_tour() const {
  return std::all_of(degrees.begin(), degrees.end(), [](std::int32_t d) { return d == 2; });
}

std::vector<Edge> OneTree::edges() const {
  std::vector<Edge> out(tree_edges);
  out.push_back(root_edges[0]);
  out.push_back(root_edges[1]);
  return out;
}

std::optional<Tour> OneTree::to_tour(const Instance& inst) const {
  if (!is_tour()) return std::nullopt;
  const int n = inst.size();
  std::vector<std::array<Vertex, 2>> adj(static_cast<std::size_t>(n), {-1, -1});
  for (const Edge& e : edges()) {
    auto& a = adj[static_cast<std::size_t>(e.u)];
    a[a[0] < 0 ? 0 : 1] = e.v;
    auto& b = adj[static_cast<std::size_t>(e.v)];
    b[b[0] < 0 ? 0 : 1] = e.u;
  }
  std::vector<Vertex> order;
  order.reserve(static_cast<std::size_t>(n));
  Vertex prev = -1;
  Vertex cur = root;
  for (int k = 0; k < n; ++k) {
    order.push_back(cur);
    const auto& a = adj[static_cast<std::size_t>(cur)];
    const Vertex next = a[0] != prev ? a[0] : a[1];
    prev = cur;
    cur = next;
  }
  // Degree-2 everywhere but two disjoint cycles would revisit a vertex here.
  if (cur != root) return std::nullopt;
  Tour t = make_tour(inst, std::move(order));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Vertex v : t.order) {
    if (seen[static_cast<std::size_t>(v)]) return std::nullopt;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return t;
}

// ---------------------------------------------------------------------------
// build_one_tree

std::optional<OneTree> build_one_tree(const Instance& inst, const EdgeState& state,
                                      std::span<const double> pi, Vertex root) {
  const int n = inst.size();
  const auto& kern = kernels::active();

  std::vector<Candidate> free_edges;
  std::vector<Candidate> free_root;
  std::vector<Candidate> forced_tree;
  std::vector<Candidate> forced_root;
  free_edges.reserve(inst.edge_count());
  std::vector<double> row(static_cast<std::size_t>(n));

  std::size_t index = 0;
  for (Vertex u = 0; u < n; ++u) {
    const std::size_t off = static_cast<std::size_t>(u) + 1;
    const std::size_t len = static_cast<std::size_t>(n) - off;
    kern.reduced_cost_row(inst.cost_row(u).data() + off, pi.data() + off,
                          pi[static_cast<std::size_t>(u)], row.data(), len);
    for (Vertex v = u + 1; v < n; ++v, ++index) {
      const Edge e(u, v);
      const EdgeStatus s = state.status(e);
      if (s == EdgeStatus::forbidden) continue;
      const Candidate c{row[static_cast<std::size_t>(v) - off], index, e};
      const bool at_root = u == root || v == root;
      if (s == EdgeStatus::forced) {
        (at_root ? forced_root : forced_tree).push_back(c);
      } else if (!state.saturated(u) && !state.saturated(v)) {
        (at_root ? free_root : free_edges).push_back(c);
      }
    }
  }

  OneTree t;
  t.root = root;
  t.degrees.assign(static_cast<std::size_t>(n), 0);
  t.tree_edges.reserve(static_cast<std::size_t>(n) - 2);
  const std::size_t tree_size = static_cast<std::size_t>(n) - 2;
  double sum = 0.0;

  const auto take = [&](const Candidate& c) {
    sum += c.rc;
    ++t.degrees[static_cast<std::size_t>(c.edge.u)];
    ++t.degrees[static_cast<std::size_t>(c.edge.v)];
  };

  DisjointSets sets(n);
  for (const Candidate& c : forced_tree) {
    if (!sets.unite(c.edge.u, c.edge.v)) return std::nullopt;
    t.tree_edges.push_back(c.edge);
    take(c);
  }
  std::sort(free_edges.begin(), free_edges.end(), cheaper);
  for (const Candidate& c : free_edges) {
    if (t.tree_edges.size() == tree_size) break;
    if (!sets.unite(c.edge.u, c.edge.v)) continue;
    t.tree_edges.push_back(c.edge);
    take(c);
  }
  if (t.tree_edges.size() != tree_size) return std::nullopt;

  if (forced_root.size() > 2) return std::nullopt;
  std::sort(free_root.begin(), free_root.end(), cheaper);
  std::size_t filled = 0;
  for (const Candidate& c : forced_root) {
    t.root_edges[filled++] = c.edge;
    take(c);
  }
  for (const Candidate& c : free_root) {
    if (filled == 2) break;
    t.root_edges[filled++] = c.edge;
    take(c);
  }
  if (filled < 2) return std::nullopt;

  double pi_sum = 0.0;
  for (const double p : pi) pi_sum += p;
  t.lagrangian_cost = sum - 2.0 * pi_sum;
  return t;
}

// ---------------------------------------------------------------------------
// select_root

std::optional<RootChoice> select_root(const Instance& inst, const EdgeState& state,
                                      const ProbabilityMatrix* probs, Mode mode, double tie_eps) {
  const int n = inst.size();
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<std::optional<OneTree>> trees(static_cast<std::size_t>(n));
  double best = -kInf;
  for (Vertex r = 0; r < n; ++r) {
    trees[static_cast<std::size_t>(r)] = build_one_tree(inst, state, zero, r);
    if (trees[static_cast<std::size_t>(r)]) best = std::max(best, trees[static_cast<std::size_t>(r)]->lagrangian_cost);
  }
  if (best == -kInf) return std::nullopt;

  const bool guided = mode == Mode::gcbb && probs != nullptr;
  std::optional<Vertex> chosen;
  double chosen_score = -kInf;
  for (Vertex r = 0; r < n; ++r) {
    const auto& t = trees[static_cast<std::size_t>(r)];
    if (!t || t->lagrangian_cost < best - tie_eps) continue;
    if (!guided) {
      chosen = r;
      break;
    }
    const double score = expected_optimality(t->edges(), *probs).value;
    const auto& cur = chosen ? trees[static_cast<std::size_t>(*chosen)] : std::optional<OneTree>{};
    if (!chosen || score > chosen_score ||
        (score == chosen_score && t->lagrangian_cost > cur->lagrangian_cost)) {
      chosen = r;
      chosen_score = score;
    }
  }
  return RootChoice{*chosen, std::move(*trees[static_cast<std::size_t>(*chosen)])};
}

// ---------------------------------------------------------------------------
// FractionalScores

FractionalScores::FractionalScores(const Instance& inst) : counts_(inst.edge_count(), 0) {}

FractionalScores::FractionalScores(int n, std::vector<std::uint32_t> counts, std::uint32_t window)
    : counts_(std::move(counts)), window_(window) {
  counts_.resize(static_cast<std::size_t>(n) * (n - 1) / 2, 0);
}

void FractionalScores::add(const Instance& inst, const OneTree& tree) {
  for (const Edge& e : tree.tree_edges) ++counts_[inst.edge_index(e)];
  for (const Edge& e : tree.root_edges) ++counts_[inst.edge_index(e)];
  ++window_;
}

// ---------------------------------------------------------------------------
// subgradient_ascent

std::optional<AscentResult> subgradient_ascent(const Instance& inst, const EdgeState& state,
                                               Vertex root, std::span<const double> init_pi,
                                               const AscentParams& params, double ub) {
  const int n = inst.size();
  const int iters = std::max(params.iters, 1);
  const int window = (iters + 1) / 2;
  const auto& kern = kernels::active();

  std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
  if (!init_pi.empty()) std::copy(init_pi.begin(), init_pi.end(), pi.begin());

  AscentResult res;
  res.scores = FractionalScores(inst);
  res.lagrange.step = params.initial_step;
  res.bounds.reserve(static_cast<std::size_t>(iters));
  res.best_lb_trace.reserve(static_cast<std::size_t>(iters));

  for (int k = 1; k <= iters; ++k) {
    auto tree = build_one_tree(inst, state, pi, root);
    if (!tree) return std::nullopt;
    const double bound = tree->lagrangian_cost;
    res.bounds.push_back(bound);
    res.lagrange.iteration = k;
    if (k > iters - window) res.scores.add(inst, *tree);

    const bool tour = tree->is_tour();
    const bool improved = bound > res.lagrange.best_lb || tour;
    if (improved) {
      res.lagrange.best_lb = std::max(res.lagrange.best_lb, bound);
      res.lagrange.pi = pi;
      res.tree = std::move(*tree);
    }
    res.best_lb_trace.push_back(res.lagrange.best_lb);

    if (tour) {
      res.found_tour = true;
      break;
    }
    if (res.lagrange.best_lb >= ub - params.prune_eps) {
      res.reached_ub = true;
      break;
    }
    if (k < iters) {
      const auto& deg = improved ? res.tree.degrees : tree->degrees;
      kern.ascent_step(pi.data(), deg.data(), res.lagrange.step, static_cast<std::size_t>(n));
      res.lagrange.step *= params.decay;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// fix_edges

FixResult fix_edges(const Instance& inst, const EdgeState& state, const OneTree& tree,
                    std::span<const double> pi, double lb, double ub, double prune_eps) {
  FixResult res{state};
  if (!std::isfinite(ub)) return res;
  const double threshold = ub - prune_eps;
  const int n = inst.size();
  const Vertex root = tree.root;
  const auto nn = static_cast<std::size_t>(n);

  std::vector<char> in_tree(nn * nn, 0);
  std::vector<std::vector<Vertex>> adj(nn);
  for (const Edge& e : tree.tree_edges) {
    in_tree[e.u * nn + e.v] = 1;
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (const Edge& e : tree.root_edges) in_tree[e.u * nn + e.v] = 1;

  // Orient the tree on V \ {root}; up_* describe the edge to the parent.
  const Vertex anchor = root == 0 ? 1 : 0;
  std::vector<Vertex> parent(nn, -1);
  std::vector<int> depth(nn, 0);
  std::vector<double> up_rc(nn, 0.0);
  std::vector<char> up_forced(nn, 0);
  std::vector<double> repl(nn, kInf);
  {
    std::vector<Vertex> queue{anchor};
    parent[static_cast<std::size_t>(anchor)] = anchor;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex a = queue[head];
      for (const Vertex b : adj[static_cast<std::size_t>(a)]) {
        if (parent[static_cast<std::size_t>(b)] >= 0) continue;
        parent[static_cast<std::size_t>(b)] = a;
        depth[static_cast<std::size_t>(b)] = depth[static_cast<std::size_t>(a)] + 1;
        const Edge up(a, b);
        up_rc[static_cast<std::size_t>(b)] = reduced_cost(inst, pi, up);
        up_forced[static_cast<std::size_t>(b)] = state.status(up) == EdgeStatus::forced;
        queue.push_back(b);
      }
    }
  }

  const auto path_max = [&](Vertex a, Vertex b) {
    double best = -kInf;
    while (a != b) {
      if (depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)]) std::swap(a, b);
      if (!up_forced[static_cast<std::size_t>(a)]) best = std::max(best, up_rc[static_cast<std::size_t>(a)]);
      a = parent[static_cast<std::size_t>(a)];
    }
    return best;
  };
  const auto offer_replacement = [&](Vertex a, Vertex b, double rc) {
    while (a != b) {
      if (depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)]) std::swap(a, b);
      if (!up_forced[static_cast<std::size_t>(a)]) {
        repl[static_cast<std::size_t>(a)] = std::min(repl[static_cast<std::size_t>(a)], rc);
      }
      a = parent[static_cast<std::size_t>(a)];
    }
  };

  // Non-tree edges off the root: entering e drops the dearest exchangeable
  // edge on its tree cycle.
  for (Vertex u = 0; u < n; ++u) {
    if (u == root) continue;
    for (Vertex v = u + 1; v < n; ++v) {
      if (v == root || in_tree[u * nn + v]) continue;
      const Edge e(u, v);
      if (!state.branchable(e)) continue;
      const double rc = reduced_cost(inst, pi, e);
      const double out = path_max(u, v);
      if (out == -kInf || lb + (rc - out) >= threshold) {
        res.state.forbid(e);
        ++res.forbidden;
      } else {
        offer_replacement(u, v, rc);
      }
    }
  }

  // Root edges: entering e drops the dearer non-forced root edge.
  double root_out = -kInf;
  for (const Edge& f : tree.root_edges) {
    if (state.status(f) != EdgeStatus::forced) root_out = std::max(root_out, reduced_cost(inst, pi, f));
  }
  double root_in = kInf;
  for (Vertex j = 0; j < n; ++j) {
    if (j == root) continue;
    const Edge e(root, j);
    if (in_tree[e.u * nn + e.v] || !state.branchable(e)) continue;
    const double rc = reduced_cost(inst, pi, e);
    if (root_out == -kInf || lb + (rc - root_out) >= threshold) {
      res.state.forbid(e);
      ++res.forbidden;
    } else {
      root_in = std::min(root_in, rc);
    }
  }

  // Tree edges whose removal cannot be repaired cheaply enough.
  const auto try_force = [&](const Edge& f) {
    if (!res.state.force(f)) {
      res.infeasible = true;
      return false;
    }
    ++res.forced;
    return true;
  };
  for (Vertex v = 0; v < n; ++v) {
    if (v == root || v == anchor || up_forced[static_cast<std::size_t>(v)]) continue;
    const Edge f(v, parent[static_cast<std::size_t>(v)]);
    if (state.status(f) != EdgeStatus::free) continue;
    const double r = repl[static_cast<std::size_t>(v)];
    if (r == kInf || lb + (r - up_rc[static_cast<std::size_t>(v)]) >= threshold) {
      if (!try_force(f)) return res;
    }
  }
  for (const Edge& f : tree.root_edges) {
    if (state.status(f) != EdgeStatus::free) continue;
    const double rc = reduced_cost(inst, pi, f);
    if (root_in == kInf || lb + (root_in - rc) >= threshold) {
      if (!try_force(f)) return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// choose_branch_edge

std::optional<Edge> choose_branch_edge(const Instance& inst, const FractionalScores& scores,
                                       const EdgeState& state, const OneTree& tree,
                                       std::span<const double> pi, const ProbabilityMatrix* probs,
                                       Mode mode) {
  const int n = inst.size();
  const bool guided = mode == Mode::gcbb && probs != nullptr;
  const auto prob = [&](const Edge& e) { return guided ? (*probs)(e) : 0.0; };

  // Distance to 0.5 kept in integers: |2 * count - window|.
  const std::int64_t window = scores.window();
  std::optional<Edge> best;
  std::int64_t best_key = 0;
  double best_p = 0.0;
  std::size_t index = 0;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v, ++index) {
      const std::int64_t c = scores.count(index);
      if (c == 0 || c >= window) continue;
      const Edge e(u, v);
      if (!state.branchable(e)) continue;
      const std::int64_t key = std::abs(2 * c - window);
      const double p = prob(e);
      if (!best || key < best_key || (key == best_key && p > best_p)) {
        best = e;
        best_key = key;
        best_p = p;
      }
    }
  }
  if (best) return best;

  double best_rc = -kInf;
  std::size_t best_index = 0;
  for (const Edge& e : tree.edges()) {
    if (!state.branchable(e)) continue;
    if (tree.degrees[static_cast<std::size_t>(e.u)] <= 2 && tree.degrees[static_cast<std::size_t>(e.v)] <= 2) {
      continue;
    }
    const double rc = reduced_cost(inst, pi, e);
    const double p = prob(e);
    const std::size_t idx = inst.edge_index(e);
    const bool better = !best || rc > best_rc ||
                        (rc == best_rc && (p > best_p || (p == best_p && idx < best_index)));
    if (better) {
      best = e;
      best_rc = rc;
      best_p = p;
      best_index = idx;
    }
  }
  return best;
}

}  // namespace gcbb
