// Compiled with -mavx2 only (no FMA) so products and sums round exactly as
// in the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "gehm/simd/kernels.hpp"

namespace gehm::simd {

namespace {

inline __m256d abs_pd(__m256d x) noexcept {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline __m256d ipow_pd(__m256d a, int k) noexcept {
  __m256d f = _mm256_set1_pd(1.0);
  for (int r = 0; r < k; ++r) f = _mm256_mul_pd(f, a);
  return f;
}

inline __m256d pow_lanes(__m256d a, double e) noexcept {
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, a);
  for (double& t : tmp) t = std::pow(t, e);
  return _mm256_load_pd(tmp);
}

inline double hsum(__m256d v) noexcept {
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, v);
  return ((tmp[0] + tmp[1]) + tmp[2]) + tmp[3];
}

inline __m256d gather(const double* u, const NodeId* idx) noexcept {
  const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx));
  return _mm256_i32gather_pd(u, vi, 8);
}

void p_laplacian(CsrView g, std::span<const double> u, double p, double eps,
                 std::span<double> out) {
  const int k = small_integer_exponent(p - 2.0);
  const double e = p - 2.0;
  const std::size_t n = g.nodes();
  const double* up = u.data();
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = up[i];
    const __m256d vui = _mm256_set1_pd(ui);
    __m256d acc = zero;
    std::size_t j = g.row_ptr[i];
    const std::size_t end = g.row_ptr[i + 1];
    for (; j + 4 <= end; j += 4) {
      const __m256d d = _mm256_sub_pd(gather(up, g.col.data() + j), vui);
      const __m256d a = _mm256_add_pd(abs_pd(d), veps);
      const __m256d f = k >= 0 ? ipow_pd(a, k) : pow_lanes(a, e);
      __m256d term = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(g.weight.data() + j), f), d);
      term = _mm256_and_pd(term, _mm256_cmp_pd(d, zero, _CMP_NEQ_UQ));
      acc = _mm256_add_pd(acc, term);
    }
    double s = hsum(acc);
    for (; j < end; ++j) {
      const double d = up[g.col[j]] - ui;
      if (d != 0.0) {
        const double a = std::fabs(d) + eps;
        double f = 1.0;
        if (k >= 0) {
          for (int r = 0; r < k; ++r) f *= a;
        } else {
          f = std::pow(a, e);
        }
        s += g.weight[j] * f * d;
      }
    }
    out[i] = s;
  }
}

double edge_power_sum(CsrView g, std::span<const double> u, double p) {
  const int k = small_integer_exponent(p);
  const std::size_t n = g.nodes();
  const double* up = u.data();
  __m256d acc = _mm256_setzero_pd();
  double tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = up[i];
    const __m256d vui = _mm256_set1_pd(ui);
    std::size_t j = g.row_ptr[i];
    const std::size_t end = g.row_ptr[i + 1];
    for (; j + 4 <= end; j += 4) {
      const __m256d a = abs_pd(_mm256_sub_pd(vui, gather(up, g.col.data() + j)));
      const __m256d f = k >= 0 ? ipow_pd(a, k) : pow_lanes(a, p);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(g.weight.data() + j), f));
    }
    for (; j < end; ++j) {
      const double a = std::fabs(ui - up[g.col[j]]);
      double f = 1.0;
      if (k >= 0) {
        for (int r = 0; r < k; ++r) f *= a;
      } else {
        f = std::pow(a, p);
      }
      tail += g.weight[j] * f;
    }
  }
  return hsum(acc) + tail;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i])));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(&a[i + 4]), _mm256_loadu_pd(&b[i + 4])));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void euler_update(std::span<double> u, std::span<const double> lap, std::span<const double> react,
                  std::span<const double> noise, double dt) {
  const std::size_t n = u.size();
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(&u[i]);
    x = _mm256_add_pd(x, _mm256_mul_pd(vdt, _mm256_loadu_pd(&lap[i])));
    x = _mm256_add_pd(x, _mm256_mul_pd(vdt, _mm256_loadu_pd(&react[i])));
    x = _mm256_add_pd(x, _mm256_loadu_pd(&noise[i]));
    _mm256_storeu_pd(&u[i], x);
  }
  for (; i < n; ++i) u[i] = u[i] + dt * lap[i] + dt * react[i] + noise[i];
}

constexpr KernelTable kAvx2{"avx2", p_laplacian, edge_power_sum, dot, euler_update};

}  // namespace

const KernelTable* avx2_table_if_built() noexcept { return &kAvx2; }

}  // namespace gehm::simd
