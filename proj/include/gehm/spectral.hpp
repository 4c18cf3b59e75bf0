#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gehm/graph.hpp"

namespace gehm {

enum class GammaBasis { raw_adjacency, normalized_W };

std::string to_string(GammaBasis basis);
GammaBasis parse_gamma_basis(const std::string& name);

struct SpectralEstimate {
  double lambda_p = 0.0;
  std::vector<double> eigenvector;  // unit p-norm
  double gamma = 0.0;
  GammaBasis gamma_basis = GammaBasis::raw_adjacency;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||L_p v - lambda |v|^(p-2) v||_2
  bool converged = false;
  int restarts = 0;
};

struct RadiusEstimate {
  double rho = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dominant eigenpair of L_p v = lambda |v|^(p-2) v, L_p = -Delta_p (eps = 0),
/// by the dual-exponent power iteration
///
///   v <- |L_p v|^(p'-2) L_p v / ||L_p v||_p',   1/p + 1/p' = 1,
///
/// renormalized to unit p-norm after each sweep. lambda is read off as the
/// generalized Rayleigh quotient <L_p v, v> / ||v||_p^p. Stops once the
/// relative change of lambda stays below tol for three consecutive sweeps.
/// Exhausting max_iter is reported through `converged`, not thrown.
/// Only the lambda fields are filled; gamma is left at zero.
SpectralEstimate nonlinear_eigenpair(const WeightedGraph& graph, double p, double tol,
                                     std::size_t max_iter, std::uint64_t seed);

/// Perron root of the 0/1 adjacency (raw_adjacency) or of the stored weight
/// matrix (normalized_W), by power iteration on M + I so that bipartite
/// graphs do not oscillate.
RadiusEstimate spectral_radius(const WeightedGraph& graph, GammaBasis basis, double tol,
                               std::size_t max_iter, std::uint64_t seed);

/// <Delta_p u, u> / ||u||_2^2 with eps = 0. Throws DomainError for u = 0.
double rayleigh_quotient_p(const WeightedGraph& graph, std::span<const double> u, double p);

/// R = C_F - lambda_p + Gamma
constexpr double regime_index(double C_F, double lambda_p, double gamma) noexcept {
  return C_F - lambda_p + gamma;
}

/// Second-smallest eigenvalue of the weighted Laplacian D - W (p = 2), by a
/// dense solve. Throws DomainError above max_nodes.
double algebraic_connectivity(const WeightedGraph& graph, std::size_t max_nodes = 3000);

/// p-norm (sum |x|^p)^(1/p).
double p_norm(std::span<const double> x, double p);

}  // namespace gehm
