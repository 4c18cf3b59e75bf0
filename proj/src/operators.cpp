#include "gehm/operators.hpp"

#include <cmath>

#include "gehm/error.hpp"
#include "gehm/simd/kernels.hpp"

namespace gehm {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw InputError(std::string(what) + ": length " + std::to_string(got) + " does not match " +
                     std::to_string(want));
  }
}

void require_finite(std::span<const double> u, const char* what) {
  for (double v : u) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

EdgeField discrete_gradient(const WeightedGraph& graph, std::span<const double> u) {
  require_length(u.size(), graph.nodes(), "discrete_gradient");
  EdgeField g;
  g.values.resize(graph.directed_edges());
  const auto rp = graph.row_ptr();
  const auto col = graph.col();
  for (std::size_t i = 0; i < graph.nodes(); ++i) {
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) g.values[e] = u[i] - u[col[e]];
  }
  return g;
}

std::vector<double> divergence(const WeightedGraph& graph, const EdgeField& g) {
  require_length(g.values.size(), graph.directed_edges(), "divergence");
  std::vector<double> out(graph.nodes(), 0.0);
  const auto rp = graph.row_ptr();
  const auto w = graph.weights();
  for (std::size_t i = 0; i < graph.nodes(); ++i) {
    double acc = 0.0;
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) acc += w[e] * g.values[e];
    out[i] = acc;
  }
  return out;
}

void p_laplacian_into(const WeightedGraph& graph, std::span<const double> u, double p, double eps,
                      std::span<double> out) {
  simd::active_kernels().p_laplacian(graph.csr(), u, p, eps, out);
}

std::vector<double> p_laplacian(const WeightedGraph& graph, std::span<const double> u, double p,
                                double eps) {
  if (!(p >= 1.0)) throw ParameterError("p-Laplacian requires p >= 1");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParameterError("eps must be finite and >= 0");
  require_length(u.size(), graph.nodes(), "p_laplacian");
  require_finite(u, "p_laplacian");
  std::vector<double> out(graph.nodes());
  p_laplacian_into(graph, u, p, eps, out);
  return out;
}

std::vector<double> accretive_p_laplacian(const WeightedGraph& graph, std::span<const double> u,
                                          double p, double eps) {
  auto out = p_laplacian(graph, u, p, eps);
  for (double& v : out) v = -v;
  return out;
}

// ---------------------------------------------------------------------------

double ScalarMap::operator()(double x) const noexcept {
  switch (kind) {
    case ScalarMapKind::identity: return x;
    case ScalarMapKind::constant: return param;
    case ScalarMapKind::exp_scaled: return std::exp(param * x);
    case ScalarMapKind::tanh_scaled: return std::tanh(param * x);
  }
  return 0.0;
}

std::string ScalarMap::name() const {
  switch (kind) {
    case ScalarMapKind::identity: return "identity";
    case ScalarMapKind::constant: return "constant";
    case ScalarMapKind::exp_scaled: return "exp_scaled";
    case ScalarMapKind::tanh_scaled: return "tanh_scaled";
  }
  return "identity";
}

ScalarMap resolve_scalar_map(const std::string& name, double param) {
  if (!std::isfinite(param)) throw ConfigError({"scalar map '" + name + "' has a non-finite parameter"});
  if (name == "identity") return {ScalarMapKind::identity, param};
  if (name == "constant") return {ScalarMapKind::constant, param};
  if (name == "exp_scaled") return {ScalarMapKind::exp_scaled, param};
  if (name == "tanh_scaled") return {ScalarMapKind::tanh_scaled, param};
  throw ConfigError({"unknown scalar map '" + name +
                     "' (expected identity, constant, exp_scaled or tanh_scaled)"});
}

void reaction_term_into(std::span<const double> u, double x, const ReactionSpec& spec,
                        std::span<double> out) {
  double slope = 0.0;
  double offset = 0.0;
  if (const auto* lin = std::get_if<LinearReaction>(&spec)) {
    slope = lin->C_F;
    offset = lin->eta * x;
  } else {
    const auto& mod = std::get<ModulatedReaction>(spec);
    slope = mod.phi(x);
    offset = mod.psi(x);
  }
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = slope * u[i] + offset;
}

std::vector<double> reaction_term(std::span<const double> u, double x, const ReactionSpec& spec) {
  if (!std::isfinite(x)) throw InputError("reaction_term: non-finite drift state");
  std::vector<double> out(u.size());
  reaction_term_into(u, x, spec, out);
  return out;
}

// ---------------------------------------------------------------------------

bool noise_is_zero(const NoiseSpec& spec) noexcept {
  if (const auto* add = std::get_if<AdditiveNoise>(&spec)) return add->sigma == 0.0;
  return std::get<MultiplicativeNoise>(spec).sigma0 == 0.0;
}

void noise_coefficients_into(const WeightedGraph& graph, std::span<const double> u, double x,
                             const NoiseSpec& spec, std::span<double> out) {
  if (const auto* add = std::get_if<AdditiveNoise>(&spec)) {
    for (double& s : out) s = add->sigma;
    return;
  }
  const auto& mul = std::get<MultiplicativeNoise>(spec);
  const auto deg = graph.degrees();
  const double drift_factor = 1.0 + std::pow(std::fabs(x), mul.beta);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = mul.sigma0 * (1.0 + std::pow(static_cast<double>(deg[i]), mul.eta_deg)) *
             (1.0 + std::pow(std::fabs(u[i]), mul.alpha)) * drift_factor;
  }
}

std::vector<double> noise_coefficients(const WeightedGraph& graph, std::span<const double> u,
                                       double x, const NoiseSpec& spec) {
  require_length(u.size(), graph.nodes(), "noise_coefficients");
  if (const auto* add = std::get_if<AdditiveNoise>(&spec)) {
    if (!(add->sigma >= 0.0)) throw ParameterError("additive sigma must be >= 0");
  } else {
    const auto& mul = std::get<MultiplicativeNoise>(spec);
    if (!(mul.sigma0 >= 0.0)) throw ParameterError("multiplicative sigma0 must be >= 0");
    if (!std::isfinite(mul.eta_deg) || !std::isfinite(mul.alpha) || !std::isfinite(mul.beta)) {
      throw ParameterError("noise exponents must be finite");
    }
  }
  std::vector<double> out(u.size());
  noise_coefficients_into(graph, u, x, spec, out);
  return out;
}

}  // namespace gehm
