#include <cstdlib>
#include <string_view>

#include "gcbb/kernels.hpp"

namespace gcbb::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &scalar::euclidean_row, &scalar::reduced_cost_row,
                                 &scalar::ascent_step};
  return table;
}

const KernelTable* avx2_table() {
#if defined(GCBB_HAVE_AVX2_KERNELS)
  static const KernelTable table{"avx2", &avx2::euclidean_row, &avx2::reduced_cost_row,
                                 &avx2::ascent_step};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("GCBB_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace gcbb::kernels
