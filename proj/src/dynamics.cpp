#include "gehm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gehm/diagnostics.hpp"
#include "gehm/error.hpp"
#include "gehm/simd/kernels.hpp"

namespace gehm {

std::string to_string(NoiseCoupling c) {
  return c == NoiseCoupling::independent_per_node ? "independent_per_node" : "shared_scalar";
}

NoiseCoupling parse_noise_coupling(const std::string& name) {
  if (name == "independent_per_node") return NoiseCoupling::independent_per_node;
  if (name == "shared_scalar") return NoiseCoupling::shared_scalar;
  throw ConfigError({"unknown noise_coupling '" + name + "'"});
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup: return "blowup";
    case RunStatus::nonfinite: return "nonfinite";
  }
  return "completed";
}

NoiseStreams NoiseStreams::from_seed(std::uint64_t seed) {
  return {make_rng(seed, Stream::node_noise), make_rng(seed, Stream::ou_noise)};
}

std::vector<std::string> validate(const SimulationConfig& cfg, std::size_t n) {
  std::vector<std::string> issues;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(cfg.p > 1.0) || !finite(cfg.p)) issues.emplace_back("sim.p must be finite and > 1");
  if (!(cfg.eps >= 0.0) || !finite(cfg.eps)) issues.emplace_back("sim.eps must be finite and >= 0");
  if (!(cfg.dt > 0.0) || !finite(cfg.dt)) issues.emplace_back("sim.dt must be finite and > 0");
  if (!(cfg.horizon >= cfg.dt) || !finite(cfg.horizon)) {
    issues.emplace_back("sim.horizon must be finite and >= sim.dt");
  }
  if (!(cfg.ou.kappa > 0.0) || !finite(cfg.ou.kappa)) issues.emplace_back("sim.ou.kappa must be > 0");
  if (!(cfg.ou.xi >= 0.0) || !finite(cfg.ou.xi)) issues.emplace_back("sim.ou.xi must be >= 0");
  if (!finite(cfg.ou.mu)) issues.emplace_back("sim.ou.mu must be finite");
  if (!finite(cfg.ou.x0)) issues.emplace_back("sim.ou.x0 must be finite");
  if (const auto* lin = std::get_if<LinearReaction>(&cfg.reaction)) {
    if (!finite(lin->C_F) || !finite(lin->eta)) issues.emplace_back("sim.reaction parameters must be finite");
  } else {
    const auto& mod = std::get<ModulatedReaction>(cfg.reaction);
    if (!finite(mod.phi.param) || !finite(mod.psi.param)) {
      issues.emplace_back("sim.reaction map parameters must be finite");
    }
  }
  if (const auto* add = std::get_if<AdditiveNoise>(&cfg.noise)) {
    if (!(add->sigma >= 0.0) || !finite(add->sigma)) issues.emplace_back("sim.noise.sigma must be >= 0");
  } else {
    const auto& mul = std::get<MultiplicativeNoise>(cfg.noise);
    if (!(mul.sigma0 >= 0.0) || !finite(mul.sigma0)) issues.emplace_back("sim.noise.sigma0 must be >= 0");
    if (!finite(mul.eta_deg) || !finite(mul.alpha) || !finite(mul.beta)) {
      issues.emplace_back("sim.noise exponents must be finite");
    }
  }
  if (cfg.init.kind == InitKind::custom && cfg.init.values.size() != n) {
    issues.emplace_back("sim.init.values has " + std::to_string(cfg.init.values.size()) +
                        " entries for a graph of " + std::to_string(n) + " nodes");
  }
  if (cfg.init.kind == InitKind::constant && !finite(cfg.init.value)) {
    issues.emplace_back("sim.init.value must be finite");
  }
  if (cfg.blowup_threshold && !(*cfg.blowup_threshold > 0.0)) {
    issues.emplace_back("sim.blowup_threshold must be > 0");
  }
  if (!(cfg.blowup_factor > 1.0) || !finite(cfg.blowup_factor)) {
    issues.emplace_back("sim.blowup_factor must be finite and > 1");
  }
  if (cfg.record_stride == 0) issues.emplace_back("sim.record_stride must be >= 1");
  return issues;
}

std::vector<double> initial_state(const SimulationConfig& cfg, std::size_t n) {
  switch (cfg.init.kind) {
    case InitKind::constant: return std::vector<double>(n, cfg.init.value);
    case InitKind::custom: return cfg.init.values;
    case InitKind::gaussian_unit_l2: break;
  }
  Rng rng = make_rng(cfg.seed, Stream::initial_state);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(n);
  for (double& v : u) v = normal(rng);
  const double norm = std::sqrt(simd::active_kernels().dot(u, u));
  if (norm > 0.0) {
    for (double& v : u) v /= norm;
  }
  return u;
}

namespace {

struct Workspace {
  std::vector<double> lap, react, sigma, noise;

  explicit Workspace(std::size_t n) : lap(n), react(n), sigma(n), noise(n) {}
};

void advance(SystemState& s, const WeightedGraph& graph, const SimulationConfig& cfg,
             NoiseStreams& rng, Workspace& ws) {
  const auto& kernels = simd::active_kernels();
  const std::size_t n = s.u.size();
  const double sqrt_dt = std::sqrt(cfg.dt);

  kernels.p_laplacian(graph.csr(), s.u, cfg.p, cfg.eps, ws.lap);
  reaction_term_into(s.u, s.x, cfg.reaction, ws.react);

  std::normal_distribution<double> normal(0.0, 1.0);
  if (noise_is_zero(cfg.noise)) {
    std::fill(ws.noise.begin(), ws.noise.end(), 0.0);
  } else {
    noise_coefficients_into(graph, s.u, s.x, cfg.noise, ws.sigma);
    if (cfg.noise_coupling == NoiseCoupling::independent_per_node) {
      for (std::size_t i = 0; i < n; ++i) ws.noise[i] = ws.sigma[i] * (sqrt_dt * normal(rng.node));
    } else {
      const double shared = sqrt_dt * normal(rng.node);
      for (std::size_t i = 0; i < n; ++i) ws.noise[i] = ws.sigma[i] * shared;
    }
  }
  const double ou_eps = normal(rng.ou);

  kernels.euler_update(s.u, ws.lap, ws.react, ws.noise, cfg.dt);
  s.x = s.x + cfg.ou.kappa * (cfg.ou.mu - s.x) * cfg.dt + cfg.ou.xi * sqrt_dt * ou_eps;
  s.t = s.t + cfg.dt;
}

}  // namespace

SystemState step(const SystemState& state, const WeightedGraph& graph, const SimulationConfig& cfg,
                 NoiseStreams& rng) {
  if (state.u.size() != graph.nodes()) throw InputError("state length does not match graph");
  SystemState next = state;
  Workspace ws(state.u.size());
  advance(next, graph, cfg, rng, ws);
  return next;
}

double cfl_number(const WeightedGraph& graph, std::span<const double> u, double p, double eps,
                  double dt) {
  const auto rp = graph.row_ptr();
  const auto col = graph.col();
  const auto w = graph.weights();
  double max_grad = 0.0;
  double max_row = 0.0;
  for (std::size_t i = 0; i < graph.nodes(); ++i) {
    double row = 0.0;
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
      row += w[e];
      max_grad = std::max(max_grad, std::fabs(u[i] - u[col[e]]));
    }
    max_row = std::max(max_row, row);
  }
  if (max_row == 0.0) return 0.0;
  const double factor = p == 2.0 ? 1.0 : std::pow(max_grad + eps, p - 2.0);
  return dt * max_row * factor;
}

Trajectory simulate(const WeightedGraph& graph, const SimulationConfig& cfg) {
  const std::size_t n = graph.nodes();
  auto issues = validate(cfg, n);
  std::vector<double> u0;
  if (issues.empty()) u0 = initial_state(cfg, n);
  const auto& kernels = simd::active_kernels();
  double threshold = 0.0;
  double norm0 = 0.0;
  if (issues.empty()) {
    norm0 = std::sqrt(kernels.dot(u0, u0));
    threshold = cfg.blowup_threshold.value_or(norm0 > 0.0 ? cfg.blowup_factor * norm0 : cfg.blowup_factor);
    if (!(threshold > norm0)) issues.emplace_back("sim.blowup_threshold must exceed the initial ||u||_2");
  }
  Trajectory traj;
  if (issues.empty()) {
    traj.cfl_number = cfl_number(graph, u0, cfg.p, cfg.eps, cfg.dt);
    if (traj.cfl_number > 1.0 && !cfg.allow_unstable_dt) {
      issues.emplace_back("explicit step estimate dt*max_i sum_j w_ij g^(p-2) = " +
                          std::to_string(traj.cfl_number) +
                          " exceeds 1; reduce sim.dt or set allow_unstable_dt (--force)");
    } else if (traj.cfl_number > 0.5) {
      traj.warnings.push_back("explicit step estimate " + std::to_string(traj.cfl_number) +
                              " exceeds 0.5; results may reflect numerical instability");
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  traj.p = cfg.p;
  traj.blowup_threshold = threshold;
  const double threshold_sq = threshold * threshold;
  const auto total_steps = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));

  SystemState s{std::move(u0), cfg.ou.x0, 0.0};
  NoiseStreams rng = NoiseStreams::from_seed(cfg.seed);
  Workspace ws(n);

  auto record = [&](double norm_sq) {
    traj.times.push_back(s.t);
    traj.l2_norm_sq.push_back(norm_sq);
    traj.energy_p.push_back(energy_p(graph, s.u, cfg.p));
    traj.x_path.push_back(s.x);
  };
  auto snapshot = [&](std::size_t k) { traj.snapshots.push_back({k, s.t, s.u}); };

  record(kernels.dot(s.u, s.u));
  if (cfg.snapshot_stride > 0) snapshot(0);

  for (std::size_t k = 1; k <= total_steps; ++k) {
    advance(s, graph, cfg, rng, ws);
    s.t = static_cast<double>(k) * cfg.dt;
    traj.steps = k;
    const double norm_sq = kernels.dot(s.u, s.u);
    const bool finite = std::isfinite(norm_sq) && std::isfinite(s.x);
    const bool crossed = finite && norm_sq >= threshold_sq;
    const bool last = k == total_steps || !finite || crossed;
    if (k % cfg.record_stride == 0 || last) record(norm_sq);
    if (cfg.snapshot_stride > 0 && (k % cfg.snapshot_stride == 0 || last)) snapshot(k);
    if (!finite) {
      traj.status = RunStatus::nonfinite;
      traj.t_failed = s.t;
      break;
    }
    if (crossed) {
      traj.status = RunStatus::blowup;
      traj.t_star = s.t;
      break;
    }
  }
  traj.final_state = std::move(s);
  return traj;
}

double ou_stationary_variance(double kappa, double xi) {
  if (!(kappa > 0.0)) throw ParameterError("kappa must be > 0");
  if (!(xi >= 0.0)) throw ParameterError("xi must be >= 0");
  return xi * xi / (2.0 * kappa);
}

double predicted_blowup_time(double E0, double alpha, double p) {
  if (!(p > 2.0)) throw DomainError("no finite-time blow-up is predicted for p <= 2");
  if (!(E0 > 0.0)) throw ParameterError("E0 must be > 0");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  return std::pow(E0, 1.0 - p / 2.0) / (alpha * (p / 2.0 - 1.0));
}

Trajectory integrate_energy_surrogate(double E0, double alpha, double p, double dt,
                                      double norm_threshold, double t_max) {
  if (!(E0 > 0.0) || !(dt > 0.0) || !(t_max >= dt)) {
    throw ParameterError("surrogate requires E0 > 0, dt > 0 and t_max >= dt");
  }
  if (!(norm_threshold * norm_threshold > E0)) throw ParameterError("threshold below initial energy");
  Trajectory traj;
  traj.p = p;
  traj.blowup_threshold = norm_threshold;
  const double threshold_sq = norm_threshold * norm_threshold;
  const auto total_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  double E = E0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.l2_norm_sq.push_back(E);
    traj.energy_p.push_back(0.0);
    traj.x_path.push_back(0.0);
  };
  record(0.0);
  for (std::size_t k = 1; k <= total_steps; ++k) {
    E = E + dt * alpha * std::pow(E, p / 2.0);
    const double t = static_cast<double>(k) * dt;
    traj.steps = k;
    record(t);
    if (!std::isfinite(E)) {
      traj.status = RunStatus::nonfinite;
      traj.t_failed = t;
      break;
    }
    if (E >= threshold_sq) {
      traj.status = RunStatus::blowup;
      traj.t_star = t;
      break;
    }
  }
  traj.final_state = {{std::sqrt(E)}, 0.0, traj.times.back()};
  return traj;
}

namespace {

double ls_slope(std::span<const double> t, std::span<const double> y) {
  const auto n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::size_t final_decade_start(const Trajectory& traj) {
  const double last = traj.l2_norm_sq.back();
  std::size_t start = traj.l2_norm_sq.size() - 1;
  while (start > 0 && traj.l2_norm_sq[start - 1] >= last / 10.0) --start;
  return std::min(start, traj.l2_norm_sq.size() - 3);
}

}  // namespace

BlowupDetection detect_blowup(const Trajectory& traj) {
  if (traj.times.size() < 10) {
    throw InsufficientDataError("blow-up detection needs at least 10 recorded samples");
  }
  BlowupDetection out;
  std::size_t start = traj.times.size() / 2;
  if (traj.status == RunStatus::blowup) {
    out.t_star = traj.t_star;
    start = final_decade_start(traj);
  }
  std::vector<double> t, y;
  for (std::size_t i = start; i < traj.times.size(); ++i) {
    const double v = traj.l2_norm_sq[i];
    if (v > 0.0 && std::isfinite(v)) {
      t.push_back(traj.times[i]);
      y.push_back(std::log(v));
    }
  }
  out.growth_rate = t.size() >= 2 ? ls_slope(t, y) : 0.0;
  return out;
}

double fit_blowup_coefficient(const Trajectory& traj, double p) {
  if (traj.times.size() < 10) {
    throw InsufficientDataError("blow-up coefficient fit needs at least 10 recorded samples");
  }
  const std::size_t start = final_decade_start(traj);
  double num = 0.0, den = 0.0;
  for (std::size_t i = start; i + 1 < traj.times.size(); ++i) {
    const double E = traj.l2_norm_sq[i];
    const double dE = (traj.l2_norm_sq[i + 1] - E) / (traj.times[i + 1] - traj.times[i]);
    const double g = std::pow(E, p / 2.0);
    num += dE * g;
    den += g * g;
  }
  if (den == 0.0) throw InsufficientDataError("degenerate energy series");
  return num / den;
}

}  // namespace gehm
