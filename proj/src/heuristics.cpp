#include "gcbb/heuristics.hpp"

#include <limits>
#include <optional>
#include <vector>

#include "gcbb/error.hpp"

namespace gcbb {

namespace {

constexpr double kTieSlack = 1e-9;

// Generic greedy walk; prefer(a, b) is true when candidate a beats b from
// the current vertex. Returns nullopt on a dead end (cannot happen on a
// complete graph).
template <typename Prefer>
std::optional<Tour> greedy_walk(const Instance& inst, Vertex start, Prefer prefer) {
  const int n = inst.size();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> order;
  order.reserve(static_cast<std::size_t>(n));
  Vertex cur = start;
  visited[static_cast<std::size_t>(cur)] = 1;
  order.push_back(cur);
  for (int step = 1; step < n; ++step) {
    Vertex next = -1;
    for (Vertex v = 0; v < n; ++v) {
      if (visited[static_cast<std::size_t>(v)]) continue;
      if (next < 0 || prefer(cur, v, next)) next = v;
    }
    if (next < 0) return std::nullopt;
    visited[static_cast<std::size_t>(next)] = 1;
    order.push_back(next);
    cur = next;
  }
  return make_tour(inst, std::move(order));
}

template <typename Prefer>
Tour best_over_starts(const Instance& inst, Prefer prefer) {
  std::optional<Tour> best;
  for (Vertex s = 0; s < inst.size(); ++s) {
    auto t = greedy_walk(inst, s, prefer);
    if (t && (!best || t->length < best->length)) best = std::move(t);
  }
  return std::move(*best);
}

}  // namespace

Tour nearest_neighbor(const Instance& inst, Vertex start) {
  const auto closer = [&](Vertex cur, Vertex a, Vertex b) { return inst.cost(cur, a) < inst.cost(cur, b); };
  return *greedy_walk(inst, start, closer);
}

Tour multistart_nn(const Instance& inst) {
  const auto closer = [&](Vertex cur, Vertex a, Vertex b) { return inst.cost(cur, a) < inst.cost(cur, b); };
  return best_over_starts(inst, closer);
}

Tour probabilistic_nn(const Instance& inst, const ProbabilityMatrix& probs) {
  if (probs.size() != inst.size()) {
    throw Error(ErrorKind::input, "probability matrix is " + std::to_string(probs.size()) +
                                      "x" + std::to_string(probs.size()) + ", instance has " +
                                      std::to_string(inst.size()) + " vertices");
  }
  const auto likelier = [&](Vertex cur, Vertex a, Vertex b) {
    const double pa = probs(cur, a);
    const double pb = probs(cur, b);
    if (pa != pb) return pa > pb;
    return inst.cost(cur, a) < inst.cost(cur, b);
  };
  return best_over_starts(inst, likelier);
}

InitialTour initial_incumbent(const Instance& inst, const ProbabilityMatrix* probs, Mode mode) {
  InitialTour out{multistart_nn(inst), TourSource::nn};
  if (mode == Mode::gcbb && probs != nullptr) {
    Tour pnn = probabilistic_nn(inst, *probs);
    // Same edge set walked from another start can differ in the last ulp.
    if (pnn.length < out.tour.length - kTieSlack) {
      out.tour = std::move(pnn);
      out.source = TourSource::pnn;
    }
  }
  return out;
}

}  // namespace gcbb
