#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gehm/diagnostics.hpp"
#include "gehm/dynamics.hpp"
#include "gehm/graph.hpp"
#include "gehm/spectral.hpp"

namespace gehm {

inline constexpr int kConfigVersion = 1;

/// Which spectral quantity enters the regime index as lambda_p.
/// spectral_gap uses the dense p = 2 algebraic connectivity.
enum class LambdaChoice { dominant, spectral_gap };
std::string to_string(LambdaChoice c);

struct SpectralOptions {
  std::optional<double> p;  // defaults to sim.p
  double tol = 1e-8;
  std::size_t max_iter = 20000;
  GammaBasis gamma_basis = GammaBasis::raw_adjacency;
  LambdaChoice lambda_choice = LambdaChoice::dominant;
};

struct EventOptions {
  double threshold = 0.1;
  CrossingDirection direction = CrossingDirection::above;
  SurvivalEstimator estimator = SurvivalEstimator::nelson_aalen;
};

struct OutputOptions {
  std::string dir = "gehm-out";
  bool trajectories = true;
  bool snapshots = false;
};

struct SweepAxis {
  std::string path;  // dotted path into the resolved config, e.g. sim.reaction.C_F
  std::vector<double> values;
};

struct SweepSpec {
  SweepAxis x;
  std::optional<SweepAxis> y;
};

struct TopologyOptions {
  std::vector<GraphModelSpec> models;  // empty: BA / ER / WS at matched mean degree
  std::size_t seeds = 20;
};

/// Fully resolved experiment description. Every default equals the
/// published simulation setup: BA(n=2000, m=3), row-normalized weights,
/// p = 3, eps = 1e-8, dt = 1e-3, sigma = 0.02, kappa = 0.3, xi = 0.1,
/// seed = 123456.
struct ExperimentConfig {
  GraphModelSpec graph;
  Normalization normalization = Normalization::row;
  SimulationConfig sim;
  SpectralOptions spectral;
  double delta_band = 0.05;
  std::vector<double> cf_grid;
  EventOptions events;
  std::size_t replicates = 1;
  std::size_t workers = 1;
  OutputOptions outputs;
  std::optional<SweepSpec> sweep;
  TopologyOptions topologies;

  ExperimentConfig();
  double spectral_p() const { return spectral.p.value_or(sim.p); }
};

/// Parses a config tree. Missing keys take defaults; unknown keys, type
/// mismatches and out-of-range values are all collected into one ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Resolved tree with every field present.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Sets a numeric field addressed by a dotted path and re-validates.
/// ConfigError when the path does not resolve or touches a seed.
ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& path, double value);

nlohmann::json to_json(const GraphModelSpec& spec);

/// Default topology list for a config: BA(m), ER with the same expected
/// mean degree, WS(k = 2m, beta = 0.1), all with n = graph.n.
std::vector<GraphModelSpec> default_topologies(const ExperimentConfig& cfg);

}  // namespace gehm
