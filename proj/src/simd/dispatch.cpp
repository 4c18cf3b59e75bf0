#include <cstdlib>
#include <string_view>

#include "gehm/simd/kernels.hpp"

namespace gehm::simd {

#if defined(GEHM_HAVE_AVX2)
const KernelTable* avx2_table_if_built() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(GEHM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_table_if_built() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("GEHM_SIMD");
    const std::string_view choice = env ? env : "auto";
    if (choice == "scalar") return scalar_kernels();
    if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace gehm::simd
