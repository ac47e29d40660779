#include <cmath>

#include "gcbb/kernels.hpp"

namespace gcbb::kernels::scalar {

void euclidean_row(const double* xs, const double* ys, double x0, double y0, double* out,
                   std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - x0;
    const double dy = ys[j] - y0;
    const double sq = dx * dx;
    out[j] = std::sqrt(sq + dy * dy);
  }
}

void reduced_cost_row(const double* cost, const double* pi, double pi_i, double* out,
                      std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = (cost[j] + pi_i) + pi[j];
  }
}

void ascent_step(double* pi, const std::int32_t* degree, double step, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = static_cast<double>(degree[i] - 2);
    pi[i] = pi[i] + step * g;
  }
}

}  // namespace gcbb::kernels::scalar
