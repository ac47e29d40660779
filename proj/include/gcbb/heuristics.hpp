#pragma once

#include <string_view>

#include "gcbb/instance.hpp"
#include "gcbb/mode.hpp"
#include "gcbb/probability.hpp"

namespace gcbb {

// Which construction produced a tour.
enum class TourSource { nn, pnn, bb };

inline std::string_view to_string(TourSource s) {
  switch (s) {
    case TourSource::nn: return "NN";
    case TourSource::pnn: return "PNN";
    case TourSource::bb: return "BB";
  }
  return "?";
}

// Greedy: always the cheapest edge to an unvisited vertex, ties by index.
Tour nearest_neighbor(const Instance& inst, Vertex start);
// Shortest nearest_neighbor tour over all starts (ties by start index).
Tour multistart_nn(const Instance& inst);

// Greedy on probabilities: highest p_ij to an unvisited vertex, ties by
// cheaper edge then lower index; best tour over all starts.
Tour probabilistic_nn(const Instance& inst, const ProbabilityMatrix& probs);

struct InitialTour {
  Tour tour;
  TourSource source = TourSource::nn;
};

// classic: multistart NN. gcbb: the shorter of NN and PNN, NN on ties.
InitialTour initial_incumbent(const Instance& inst, const ProbabilityMatrix* probs, Mode mode);

}  // namespace gcbb
