#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gehm/graph.hpp"

namespace gehm {

/// One value per directed edge, aligned with WeightedGraph storage order.
struct EdgeField {
  std::vector<double> values;
};

/// (grad u)_ij = u_i - u_j for every directed entry.
EdgeField discrete_gradient(const WeightedGraph& graph, std::span<const double> u);

/// (div g)_i = sum_j w_ij g_ij
std::vector<double> divergence(const WeightedGraph& graph, const EdgeField& g);

/// Diffusive p-Laplacian
///
///   (Delta_p u)_i = sum_j w_ij (|u_j - u_i| + eps)^(p-2) (u_j - u_i)
///
/// so that u += dt * Delta_p u smooths. The regularization touches only the
/// magnitude factor; equal neighbours contribute exactly zero.
std::vector<double> p_laplacian(const WeightedGraph& graph, std::span<const double> u, double p,
                                double eps);

/// Unchecked form writing into a caller buffer; used inside time loops.
void p_laplacian_into(const WeightedGraph& graph, std::span<const double> u, double p, double eps,
                      std::span<double> out);

/// The accretive operator L_p = -Delta_p.
std::vector<double> accretive_p_laplacian(const WeightedGraph& graph, std::span<const double> u,
                                          double p, double eps);

// ---------------------------------------------------------------------------
// Reaction term

enum class ScalarMapKind { identity, constant, exp_scaled, tanh_scaled };

/// Named scalar function of the drift state. Parameter meaning: constant(c)
/// returns c; exp_scaled(a) returns exp(a x); tanh_scaled(a) returns
/// tanh(a x); identity ignores it.
struct ScalarMap {
  ScalarMapKind kind = ScalarMapKind::identity;
  double param = 0.0;

  double operator()(double x) const noexcept;
  std::string name() const;

  friend bool operator==(const ScalarMap&, const ScalarMap&) = default;
};

/// Throws ConfigError when the name is not in the registry.
ScalarMap resolve_scalar_map(const std::string& name, double param);

/// F_i = C_F u_i + eta x
struct LinearReaction {
  double C_F = 0.0;
  double eta = 0.0;
};

/// F_i = phi(x) u_i + psi(x)
struct ModulatedReaction {
  ScalarMap phi;
  ScalarMap psi{ScalarMapKind::constant, 0.0};
};

using ReactionSpec = std::variant<LinearReaction, ModulatedReaction>;

std::vector<double> reaction_term(std::span<const double> u, double x, const ReactionSpec& spec);
void reaction_term_into(std::span<const double> u, double x, const ReactionSpec& spec,
                        std::span<double> out);

// ---------------------------------------------------------------------------
// Noise coefficients

struct AdditiveNoise {
  double sigma = 0.02;
};

/// sigma_i = sigma0 (1 + deg(i)^eta_deg) (1 + |u_i|^alpha) (1 + |x|^beta)
struct MultiplicativeNoise {
  double sigma0 = 0.02;
  double eta_deg = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

using NoiseSpec = std::variant<AdditiveNoise, MultiplicativeNoise>;

std::vector<double> noise_coefficients(const WeightedGraph& graph, std::span<const double> u,
                                       double x, const NoiseSpec& spec);
void noise_coefficients_into(const WeightedGraph& graph, std::span<const double> u, double x,
                             const NoiseSpec& spec, std::span<double> out);

/// True when the noise settings make every coefficient zero.
bool noise_is_zero(const NoiseSpec& spec) noexcept;

}  // namespace gehm
