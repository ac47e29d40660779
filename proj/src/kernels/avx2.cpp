#include "gcbb/kernels.hpp"

#if defined(GCBB_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cmath>

// Compiled with a per-function target attribute so the rest of the library
// keeps the baseline ISA. FMA is deliberately not in the target list.
#define GCBB_AVX2 __attribute__((target("avx2")))

namespace gcbb::kernels::avx2 {

GCBB_AVX2 void euclidean_row(const double* xs, const double* ys, double x0, double y0,
                             double* out, std::size_t n) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + j), vx0);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + j), vy0);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(sq));
  }
  for (; j < n; ++j) {
    const double dx = xs[j] - x0;
    const double dy = ys[j] - y0;
    const double sq = dx * dx;
    out[j] = std::sqrt(sq + dy * dy);
  }
}

GCBB_AVX2 void reduced_cost_row(const double* cost, const double* pi, double pi_i, double* out,
                                std::size_t n) {
  const __m256d vpi = _mm256_set1_pd(pi_i);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d c = _mm256_add_pd(_mm256_loadu_pd(cost + j), vpi);
    _mm256_storeu_pd(out + j, _mm256_add_pd(c, _mm256_loadu_pd(pi + j)));
  }
  for (; j < n; ++j) {
    out[j] = (cost[j] + pi_i) + pi[j];
  }
}

GCBB_AVX2 void ascent_step(double* pi, const std::int32_t* degree, double step, std::size_t n) {
  const __m128i two = _mm_set1_epi32(2);
  const __m256d vstep = _mm256_set1_pd(step);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i d = _mm_loadu_si128(reinterpret_cast<const __m128i*>(degree + i));
    const __m256d g = _mm256_cvtepi32_pd(_mm_sub_epi32(d, two));
    const __m256d p = _mm256_loadu_pd(pi + i);
    _mm256_storeu_pd(pi + i, _mm256_add_pd(p, _mm256_mul_pd(vstep, g)));
  }
  for (; i < n; ++i) {
    const double g = static_cast<double>(degree[i] - 2);
    pi[i] = pi[i] + step * g;
  }
}

}  // namespace gcbb::kernels::avx2

#endif
