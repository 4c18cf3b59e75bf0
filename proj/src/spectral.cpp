#include "gehm/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "gehm/error.hpp"
#include "gehm/operators.hpp"
#include "gehm/rng.hpp"
#include "gehm/simd/kernels.hpp"

namespace gehm {

std::string to_string(GammaBasis basis) {
  return basis == GammaBasis::raw_adjacency ? "raw_adjacency" : "normalized_W";
}

GammaBasis parse_gamma_basis(const std::string& name) {
  if (name == "raw_adjacency") return GammaBasis::raw_adjacency;
  if (name == "normalized_W") return GammaBasis::normalized_W;
  throw ParameterError("unknown gamma basis '" + name + "'");
}

double p_norm(std::span<const double> x, double p) {
  if (p == 2.0) return std::sqrt(simd::active_kernels().dot(x, x));
  double acc = 0.0;
  for (double v : x) acc += std::pow(std::fabs(v), p);
  return std::pow(acc, 1.0 / p);
}

namespace {

void scale(std::span<double> x, double s) {
  for (double& v : x) v *= s;
}

void accretive(const WeightedGraph& g, std::span<const double> v, double p, std::span<double> out) {
  p_laplacian_into(g, v, p, 0.0, out);
  for (double& x : out) x = -x;
}

// ||L_p v - lambda |v|^(p-2) v||_2
double residual(std::span<const double> v, std::span<const double> lv, double lambda, double p) {
  double res = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double phi = v[i] == 0.0 ? 0.0 : std::pow(std::fabs(v[i]), p - 2.0) * v[i];
    const double r = lv[i] - lambda * phi;
    res += r * r;
  }
  return std::sqrt(res);
}

}  // namespace

SpectralEstimate nonlinear_eigenpair(const WeightedGraph& graph, double p, double tol,
                                     std::size_t max_iter, std::uint64_t seed) {
  if (!(p > 1.0)) throw ParameterError("nonlinear_eigenpair requires p > 1");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const std::size_t n = graph.nodes();
  if (n == 0) throw ParameterError("graph has no nodes");

  const double dual = p / (p - 1.0);
  const auto& kernels = simd::active_kernels();
  Rng rng = make_rng(seed, Stream::spectral_init);

  SpectralEstimate est;
  std::vector<double> v(n);
  std::vector<double> lv(n);

  auto randomize = [&](bool positive) {
    if (positive) {
      std::uniform_real_distribution<double> unif(0.1, 1.0);
      for (double& x : v) x = unif(rng);
    } else {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (double& x : v) x = normal(rng);
    }
    scale(v, 1.0 / p_norm(v, p));
  };
  randomize(true);

  double lambda_prev = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  std::size_t it = 0;
  while (it < max_iter) {
    accretive(graph, v, p, lv);
    ++it;
    est.lambda_p = kernels.dot(lv, v);  // ||v||_p = 1

    const double lv_norm = p_norm(lv, dual);
    if (lv_norm == 0.0) {
      if (est.restarts >= 3) break;
      ++est.restarts;
      randomize(false);
      lambda_prev = std::numeric_limits<double>::quiet_NaN();
      stable = 0;
      continue;
    }

    const double change = std::fabs(est.lambda_p - lambda_prev);
    if (change <= tol * std::fabs(est.lambda_p)) {
      if (++stable >= 3 && residual(v, lv, est.lambda_p, p) <= tol * std::max(1.0, est.lambda_p)) {
        est.converged = true;
        break;
      }
    } else {
      stable = 0;
    }
    lambda_prev = est.lambda_p;

    for (std::size_t i = 0; i < n; ++i) {
      const double x = lv[i];
      v[i] = x == 0.0 ? 0.0 : std::pow(std::fabs(x), dual - 2.0) * x / lv_norm;
    }
    scale(v, 1.0 / p_norm(v, p));
  }
  est.iterations = it;

  accretive(graph, v, p, lv);
  est.residual = residual(v, lv, est.lambda_p, p);
  est.eigenvector = std::move(v);
  return est;
}

RadiusEstimate spectral_radius(const WeightedGraph& graph, GammaBasis basis, double tol,
                               std::size_t max_iter, std::uint64_t seed) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const std::size_t n = graph.nodes();
  if (n == 0) throw ParameterError("graph has no nodes");

  const auto rp = graph.row_ptr();
  const auto col = graph.col();
  const auto w = graph.weights();
  const bool raw = basis == GammaBasis::raw_adjacency;
  const bool symmetric = raw || graph.is_value_symmetric();
  const auto& kernels = simd::active_kernels();

  Rng rng = make_rng(seed, Stream::spectral_init, 1);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> v(n), y(n);
  for (double& x : v) x = unif(rng);
  scale(v, 1.0 / std::sqrt(kernels.dot(v, v)));

  RadiusEstimate out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = v[i];
      for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) acc += (raw ? 1.0 : w[e]) * v[col[e]];
      y[i] = acc;
    }
    const double ynorm = std::sqrt(kernels.dot(y, y));
    const double shifted = symmetric ? kernels.dot(y, v) : ynorm;
    out.rho = shifted - 1.0;
    out.iterations = it;
    if (std::fabs(out.rho - prev) <= tol * std::max(std::fabs(out.rho), 1.0)) {
      if (++stable >= 3) {
        out.converged = true;
        break;
      }
    } else {
      stable = 0;
    }
    prev = out.rho;
    if (ynorm == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / ynorm;
  }
  out.rho = std::max(out.rho, 0.0);
  return out;
}

double rayleigh_quotient_p(const WeightedGraph& graph, std::span<const double> u, double p) {
  const auto lap = p_laplacian(graph, u, p, 0.0);
  const auto& kernels = simd::active_kernels();
  const double norm_sq = kernels.dot(u, u);
  if (norm_sq == 0.0) throw DomainError("Rayleigh quotient of the zero vector");
  return kernels.dot(lap, u) / norm_sq;
}

double algebraic_connectivity(const WeightedGraph& graph, std::size_t max_nodes) {
  const std::size_t n = graph.nodes();
  if (n < 2) throw DomainError("algebraic connectivity needs at least two nodes");
  if (n > max_nodes) {
    throw DomainError("dense Laplacian solve limited to " + std::to_string(max_nodes) + " nodes");
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : graph.edges()) {
    L(e.i, e.j) -= e.w;
    L(e.i, e.i) += e.w;
  }
  std::vector<double> ev(n);
  if (graph.is_value_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, Eigen::EigenvaluesOnly);
    for (std::size_t k = 0; k < n; ++k) ev[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(L, false);
    for (std::size_t k = 0; k < n; ++k) {
      ev[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k)).real();
    }
  }
  std::sort(ev.begin(), ev.end());
  return std::max(ev[1], 0.0);
}

}  // namespace gehm
