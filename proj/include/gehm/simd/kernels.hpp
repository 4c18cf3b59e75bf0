#pragma once

// Inner loops of the node/edge arithmetic, in a portable scalar reference
// form and (on x86-64) an AVX2 form. The active table is picked once at
// startup from the CPU features; GEHM_SIMD=scalar|avx2 overrides the choice.
//
// Variants agree elementwise for euler_update and up to summation order for
// the reductions (tests/test_kernels.cpp holds the equivalence checks).

#include <cstddef>
#include <span>

#include "gehm/graph.hpp"

namespace gehm::simd {

struct KernelTable {
  const char* name;

  // out_i = sum_j w_ij (|u_j - u_i| + eps)^(p-2) (u_j - u_i), zero gradients
  // contribute exactly zero.
  void (*p_laplacian)(CsrView g, std::span<const double> u, double p, double eps,
                      std::span<double> out);

  // sum over directed entries of w_ij |u_i - u_j|^p
  double (*edge_power_sum)(CsrView g, std::span<const double> u, double p);

  double (*dot)(std::span<const double> a, std::span<const double> b);

  // u_i <- u_i + dt*lap_i + dt*react_i + noise_i
  void (*euler_update)(std::span<double> u, std::span<const double> lap,
                       std::span<const double> react, std::span<const double> noise, double dt);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

const KernelTable& active_kernels() noexcept;

/// Exponent e as a small non-negative integer, or -1 when it is not one.
/// Integer exponents are evaluated by repeated multiplication.
inline int small_integer_exponent(double e) noexcept {
  if (e >= 0.0 && e <= 16.0 && e == static_cast<double>(static_cast<int>(e))) {
    return static_cast<int>(e);
  }
  return -1;
}

}  // namespace gehm::simd
