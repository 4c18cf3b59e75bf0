#include "doctest.h"

#include <cmath>

#include "gehm/diagnostics.hpp"
#include "gehm/error.hpp"
#include "gehm/operators.hpp"
#include "support.hpp"

using namespace gehm;
using gehm::testing::random_connected_graph;
using gehm::testing::random_vector;

TEST_SUITE("operators") {

TEST_CASE("gradient of a single edge") {
  const auto g = gehm::testing::path_graph(2);
  const std::vector<double> u{1.0, 0.0};
  const auto grad = discrete_gradient(g, u);
  REQUIRE(grad.values.size() == 2);
  CHECK(grad.values[0] == 1.0);
  CHECK(grad.values[1] == -1.0);
  CHECK_THROWS_AS(discrete_gradient(g, std::vector<double>{1.0}), InputError);
}

TEST_CASE("gradient antisymmetry and constant kernel") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_connected_graph(3 + t % 15, 0.3, rng);
    const auto u = random_vector(g.nodes(), rng);
    const auto grad = discrete_gradient(g, u);
    const auto rp = g.row_ptr();
    const auto col = g.col();
    for (NodeId i = 0; i < g.nodes(); ++i) {
      for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
        const NodeId j = col[e];
        const auto back = std::lower_bound(col.begin() + long(rp[j]), col.begin() + long(rp[j + 1]), i);
        CHECK(grad.values[e] == -grad.values[static_cast<std::size_t>(back - col.begin())]);
      }
    }
  }
  const auto g = random_connected_graph(10, 0.3, rng);
  for (double v : discrete_gradient(g, std::vector<double>(10, 3.5)).values) CHECK(v == 0.0);
}

TEST_CASE("divergence") {
  const auto g = gehm::testing::path_graph(2);
  const auto d = divergence(g, EdgeField{{1.0, -1.0}});
  CHECK(d == std::vector<double>{1.0, -1.0});
  CHECK(divergence(g, EdgeField{{0.0, 0.0}}) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(divergence(g, EdgeField{{0.0}}), InputError);
}

TEST_CASE("divergence of the gradient is the negated p = 2 laplacian") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto g = random_connected_graph(4 + t % 12, 0.3, rng);
    const auto u = random_vector(g.nodes(), rng);
    const auto d = divergence(g, discrete_gradient(g, u));
    const auto lap = p_laplacian(g, u, 2.0, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(-lap[i]).epsilon(1e-12));
  }
}

TEST_CASE("p-laplacian on one edge") {
  const auto g = gehm::testing::path_graph(2);
  CHECK(p_laplacian(g, std::vector<double>{1.0, 0.0}, 3.0, 0.0) == std::vector<double>{-1.0, 1.0});
  CHECK(accretive_p_laplacian(g, std::vector<double>{1.0, 0.0}, 3.0, 0.0) == std::vector<double>{1.0, -1.0});
}

TEST_CASE("p-laplacian argument checks") {
  const auto g = gehm::testing::path_graph(2);
  CHECK_THROWS_AS(p_laplacian(g, std::vector<double>{1.0, 0.0}, 0.5, 0.0), ParameterError);
  CHECK_THROWS_AS(p_laplacian(g, std::vector<double>{1.0, 0.0}, 3.0, -1.0), ParameterError);
  CHECK_THROWS_AS(p_laplacian(g, std::vector<double>{1.0}, 3.0, 0.0), InputError);
  CHECK_THROWS_AS(p_laplacian(g, std::vector<double>{1.0, INFINITY}, 3.0, 0.0), InputError);
}

TEST_CASE("tied neighbours contribute nothing") {
  const auto g = gehm::testing::path_graph(3);
  const std::vector<double> u{0.4, 0.4, 1.4};
  const auto lap = p_laplacian(g, u, 3.0, 1e-8);
  CHECK(lap[0] == 0.0);
  const auto lap1 = p_laplacian(g, u, 1.5, 1e-8);
  CHECK(lap1[0] == 0.0);
}

TEST_CASE("p = 2 matches the dense laplacian") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    auto g = random_connected_graph(2 + t % 19, 0.3, rng);
    if (t % 3 == 1) g = normalize_weights(g, Normalization::row);
    const auto u = random_vector(g.nodes(), rng);
    const Eigen::VectorXd ref = -(gehm::testing::dense_laplacian(g) * gehm::testing::to_eigen(u));
    const auto lap = p_laplacian(g, u, 2.0, 0.0);
    for (std::size_t i = 0; i < lap.size(); ++i) CHECK(std::fabs(lap[i] - ref(long(i))) <= 1e-12);
  }
}

TEST_CASE("p = 2 is linear") {
  std::mt19937_64 rng(34);
  const auto g = random_connected_graph(15, 0.3, rng);
  const auto u = random_vector(15, rng);
  const auto v = random_vector(15, rng);
  std::vector<double> w(15);
  for (std::size_t i = 0; i < 15; ++i) w[i] = 2.0 * u[i] - 0.5 * v[i];
  const auto lu = p_laplacian(g, u, 2.0, 0.0);
  const auto lv = p_laplacian(g, v, 2.0, 0.0);
  const auto lw = p_laplacian(g, w, 2.0, 0.0);
  for (std::size_t i = 0; i < 15; ++i) CHECK(lw[i] == doctest::Approx(2.0 * lu[i] - 0.5 * lv[i]).epsilon(1e-12));
}

TEST_CASE("kernel, mass conservation and monotonicity on symmetric weights") {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 300; ++t) {
    auto g = random_connected_graph(2 + t % 29, 0.3, rng);
    if (t % 2) g = normalize_weights(g, Normalization::symmetric);
    const double p = 2.0 + t % 3;
    const auto u = random_vector(g.nodes(), rng);
    const auto v = random_vector(g.nodes(), rng);
    for (double x : p_laplacian(g, std::vector<double>(g.nodes(), -1.25), p, 1e-8)) CHECK(x == 0.0);
    const auto lu = p_laplacian(g, u, p, 0.0);
    const auto lv = p_laplacian(g, v, p, 0.0);
    double mass = 0.0, inner = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mass += lu[i];
      inner += (lu[i] - lv[i]) * (u[i] - v[i]);
    }
    CHECK(std::fabs(mass) <= 1e-10);
    CHECK(inner <= 1e-12);
  }
}

TEST_CASE("energy identity: <L_p u, u> = p E_p(u) on symmetric weights") {
  std::mt19937_64 rng(36);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_connected_graph(3 + t % 10, 0.4, rng);
    const auto u = random_vector(g.nodes(), rng);
    for (double p : {2.0, 3.0, 4.0}) {
      const auto lu = accretive_p_laplacian(g, u, p, 0.0);
      double inner = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) inner += lu[i] * u[i];
      CHECK(inner == doctest::Approx(p * energy_p(g, u, p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("linear reaction") {
  const std::vector<double> u{2.0, -2.0};
  CHECK(reaction_term(u, 5.0, LinearReaction{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
  const auto r = reaction_term(u, 0.1, LinearReaction{0.5, 1.0});
  CHECK(r[0] == doctest::Approx(1.1));
  CHECK(r[1] == doctest::Approx(-0.9));
}

TEST_CASE("modulated reaction with constant maps reproduces the linear form") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const double cf = unif(rng), eta = unif(rng), xbar = unif(rng);
    const auto u = random_vector(7, rng);
    const auto lin = reaction_term(u, xbar, LinearReaction{cf, eta});
    const ModulatedReaction mod{{ScalarMapKind::constant, cf}, {ScalarMapKind::constant, eta * xbar}};
    const auto m = reaction_term(u, xbar, mod);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(m[i] == doctest::Approx(lin[i]).epsilon(1e-14));
  }
}

TEST_CASE("scalar map registry") {
  CHECK(resolve_scalar_map("identity", 0.0)(1.5) == 1.5);
  CHECK(resolve_scalar_map("constant", 2.0)(-7.0) == 2.0);
  CHECK(resolve_scalar_map("exp_scaled", 0.5)(2.0) == doctest::Approx(std::exp(1.0)));
  CHECK(resolve_scalar_map("tanh_scaled", 2.0)(0.25) == doctest::Approx(std::tanh(0.5)));
  CHECK_THROWS_AS(resolve_scalar_map("sine", 1.0), ConfigError);
}

TEST_CASE("additive and multiplicative noise coefficients") {
  const auto g = gehm::testing::cycle_graph(5);
  const std::vector<double> u{0.1, -0.2, 0.3, 0.0, 1.0};
  for (double s : noise_coefficients(g, u, 0.3, AdditiveNoise{0.02})) CHECK(s == 0.02);
  for (double s : noise_coefficients(g, u, 0.3, MultiplicativeNoise{1.0, 0.0, 0.0, 0.0})) CHECK(s == 8.0);
  CHECK_THROWS_AS(noise_coefficients(g, u, 0.0, MultiplicativeNoise{-1.0, 0.0, 0.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(noise_coefficients(g, u, 0.0, AdditiveNoise{-0.1}), ParameterError);
  CHECK(noise_is_zero(AdditiveNoise{0.0}));
  CHECK_FALSE(noise_is_zero(AdditiveNoise{0.02}));

  const MultiplicativeNoise spec{0.5, 0.5, 1.0, 2.0};
  const auto s = noise_coefficients(g, u, 0.3, spec);
  CHECK(s[4] == doctest::Approx(0.5 * (1.0 + std::sqrt(2.0)) * 2.0 * (1.0 + 0.09)));
}

TEST_CASE("multiplicative noise grows with |u_i|") {
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const auto g = gehm::testing::cycle_graph(6);
  for (int t = 0; t < 200; ++t) {
    const MultiplicativeNoise spec{0.1, unif(rng) - 1.5, unif(rng), unif(rng)};
    auto u = random_vector(6, rng);
    const auto before = noise_coefficients(g, u, 0.2, spec);
    u[2] = (std::fabs(u[2]) + unif(rng)) * (u[2] < 0 ? -1.0 : 1.0);
    const auto after = noise_coefficients(g, u, 0.2, spec);
    CHECK(after[2] >= before[2]);
  }
}

}  // TEST_SUITE
