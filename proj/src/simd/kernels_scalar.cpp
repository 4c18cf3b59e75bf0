#include <cmath>

#include "gehm/simd/kernels.hpp"

namespace gehm::simd {

namespace {

inline double ipow(double a, int k) noexcept {
  double f = 1.0;
  for (int r = 0; r < k; ++r) f *= a;
  return f;
}

void p_laplacian(CsrView g, std::span<const double> u, double p, double eps,
                 std::span<double> out) {
  const int k = small_integer_exponent(p - 2.0);
  const std::size_t n = g.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    double acc = 0.0;
    for (std::size_t e = g.row_ptr[i]; e < g.row_ptr[i + 1]; ++e) {
      const double d = u[g.col[e]] - ui;
      if (d != 0.0) {
        const double a = std::fabs(d) + eps;
        const double f = k >= 0 ? ipow(a, k) : std::pow(a, p - 2.0);
        acc += g.weight[e] * f * d;
      }
    }
    out[i] = acc;
  }
}

double edge_power_sum(CsrView g, std::span<const double> u, double p) {
  const int k = small_integer_exponent(p);
  const std::size_t n = g.nodes();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    for (std::size_t e = g.row_ptr[i]; e < g.row_ptr[i + 1]; ++e) {
      const double a = std::fabs(ui - u[g.col[e]]);
      acc += g.weight[e] * (k >= 0 ? ipow(a, k) : std::pow(a, p));
    }
  }
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void euler_update(std::span<double> u, std::span<const double> lap, std::span<const double> react,
                  std::span<const double> noise, double dt) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = u[i] + dt * lap[i] + dt * react[i] + noise[i];
  }
}

constexpr KernelTable kScalar{"scalar", p_laplacian, edge_power_sum, dot, euler_update};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace gehm::simd
