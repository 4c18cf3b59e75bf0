#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gehm/graph.hpp"
#include "gehm/operators.hpp"
#include "gehm/rng.hpp"

namespace gehm {

enum class NoiseCoupling { independent_per_node, shared_scalar };
std::string to_string(NoiseCoupling c);
NoiseCoupling parse_noise_coupling(const std::string& name);

struct OuParams {
  double kappa = 0.3;
  double mu = 0.0;
  double xi = 0.1;
  double x0 = 0.0;
};

enum class InitKind { gaussian_unit_l2, constant, custom };

struct InitSpec {
  InitKind kind = InitKind::gaussian_unit_l2;
  double value = 0.0;          // constant
  std::vector<double> values;  // custom
};

struct SimulationConfig {
  double p = 3.0;
  double eps = 1e-8;
  double dt = 1e-3;
  double horizon = 1.0;
  ReactionSpec reaction = LinearReaction{};
  NoiseSpec noise = AdditiveNoise{0.02};
  NoiseCoupling noise_coupling = NoiseCoupling::independent_per_node;
  OuParams ou;
  std::uint64_t seed = 123456;
  InitSpec init;
  // Absolute ceiling on ||u||_2; when absent, blowup_factor * ||u(0)||_2
  // (or blowup_factor itself for a zero initial state).
  std::optional<double> blowup_threshold;
  double blowup_factor = 1e6;
  std::size_t snapshot_stride = 0;  // 0 = no snapshots
  std::size_t record_stride = 1;    // diagnostics every k-th step
  bool allow_unstable_dt = false;
};

/// Problems with the config for a graph of n nodes; empty when valid.
std::vector<std::string> validate(const SimulationConfig& cfg, std::size_t n);

struct SystemState {
  std::vector<double> u;
  double x = 0.0;
  double t = 0.0;
};

/// Node-noise and drift-noise engines, seeded from labelled substreams.
struct NoiseStreams {
  Rng node;
  Rng ou;

  static NoiseStreams from_seed(std::uint64_t seed);
};

/// One explicit Euler / Euler-Maruyama step:
///
///   u' = u + dt Delta_p u + dt F(u, X) + sigma(u, X) * sqrt(dt) eps
///   X' = X + kappa (mu - X) dt + xi sqrt(dt) eps'
///
/// The node stream is not consumed when the noise amplitude is identically
/// zero.
SystemState step(const SystemState& state, const WeightedGraph& graph, const SimulationConfig& cfg,
                 NoiseStreams& rng);

std::vector<double> initial_state(const SimulationConfig& cfg, std::size_t n);

enum class RunStatus { completed, blowup, nonfinite };
std::string to_string(RunStatus s);

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> u;
};

struct Trajectory {
  double p = 2.0;
  std::vector<double> times;
  std::vector<double> l2_norm_sq;
  std::vector<double> energy_p;
  std::vector<double> x_path;
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::completed;
  std::optional<double> t_star;    // first threshold crossing
  std::optional<double> t_failed;  // first non-finite state
  double blowup_threshold = 0.0;
  double cfl_number = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
  SystemState final_state;
};

/// Explicit-scheme stiffness estimate at state u:
/// dt * max_i sum_j w_ij * (max_edge |u_i - u_j| + eps)^(p-2).
double cfl_number(const WeightedGraph& graph, std::span<const double> u, double p, double eps,
                  double dt);

/// Runs step() from t = 0 until the horizon, a threshold crossing of
/// ||u||_2, or a non-finite state. A pure function of (graph, cfg).
///
/// Throws ConfigError listing every invalid field, or when the CFL estimate
/// exceeds 1 and allow_unstable_dt is off. Values above 0.5 add a warning.
Trajectory simulate(const WeightedGraph& graph, const SimulationConfig& cfg);

/// Long-run OU variance xi^2 / (2 kappa).
double ou_stationary_variance(double kappa, double xi);

/// Closed-form blow-up time of dE/dt = alpha E^(p/2):
/// E0^(1 - p/2) / (alpha (p/2 - 1)). DomainError for p <= 2.
double predicted_blowup_time(double E0, double alpha, double p);

/// Explicit Euler on dE/dt = alpha E^(p/2), recorded as a trajectory with
/// l2_norm_sq = E; the threshold applies to sqrt(E) as for node states.
Trajectory integrate_energy_surrogate(double E0, double alpha, double p, double dt,
                                      double norm_threshold, double t_max);

struct BlowupDetection {
  std::optional<double> t_star;
  double growth_rate = 0.0;  // fitted d/dt log ||u||_2^2
};

/// Least-squares slope of log ||u||_2^2. For a blow-up run the fit covers
/// the final decade (samples within a factor 10 of the last value);
/// otherwise it covers the second half of the samples.
/// InsufficientDataError below 10 samples.
BlowupDetection detect_blowup(const Trajectory& traj);

/// alpha in dE/dt ~ alpha E^(p/2), regressed over the final decade of the
/// l2_norm_sq series.
double fit_blowup_coefficient(const Trajectory& traj, double p);

}  // namespace gehm
