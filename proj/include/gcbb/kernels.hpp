#pragma once

// Dense inner loops used by the instance builder and the Lagrangian ascent.
//
// Every kernel has a scalar reference and, on x86-64, an AVX2 variant chosen
// at runtime. Variants are required to be bit-identical to the reference: no
// FMA contraction, same operation order per lane. The solver's determinism
// contract depends on that.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace gcbb::kernels {

// out[j] = sqrt((xs[j] - x0)^2 + (ys[j] - y0)^2)
using EuclideanRowFn = void (*)(const double* xs, const double* ys, double x0, double y0,
                                double* out, std::size_t n);

// out[j] = (cost[j] + pi_i) + pi[j]
using ReducedCostRowFn = void (*)(const double* cost, const double* pi, double pi_i,
                                  double* out, std::size_t n);

// pi[i] = pi[i] + step * (degree[i] - 2)
using AscentStepFn = void (*)(double* pi, const std::int32_t* degree, double step, std::size_t n);

struct KernelTable {
  std::string_view name;
  EuclideanRowFn euclidean_row;
  ReducedCostRowFn reduced_cost_row;
  AscentStepFn ascent_step;
};

namespace scalar {
void euclidean_row(const double* xs, const double* ys, double x0, double y0, double* out,
                   std::size_t n);
void reduced_cost_row(const double* cost, const double* pi, double pi_i, double* out,
                      std::size_t n);
void ascent_step(double* pi, const std::int32_t* degree, double step, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define GCBB_HAVE_AVX2_KERNELS 1
namespace avx2 {
void euclidean_row(const double* xs, const double* ys, double x0, double y0, double* out,
                   std::size_t n);
void reduced_cost_row(const double* cost, const double* pi, double pi_i, double* out,
                      std::size_t n);
void ascent_step(double* pi, const std::int32_t* degree, double step, std::size_t n);
}  // namespace avx2
#endif

const KernelTable& scalar_table();

// Null when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();

// Selected once: AVX2 when supported, unless GCBB_KERNELS=scalar is set.
const KernelTable& active();

}  // namespace gcbb::kernels
