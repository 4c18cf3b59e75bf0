#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gehm/config.hpp"
#include "gehm/diagnostics.hpp"
#include "gehm/dynamics.hpp"
#include "gehm/graph.hpp"
#include "gehm/spectral.hpp"

namespace gehm {

std::string library_version();

/// Runs fn(0..count-1) on up to `workers` threads. Exceptions are rethrown
/// for the lowest failing index.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct SpectrumReport {
  SpectralEstimate estimate;  // dominant lambda_p; gamma in the configured basis
  RadiusEstimate gamma_raw;
  RadiusEstimate gamma_normalized;
  std::optional<double> algebraic_connectivity;  // p = 2 dense solve, small graphs
  LambdaChoice lambda_choice = LambdaChoice::dominant;
  double lambda_used = 0.0;
  double gamma_used = 0.0;
  GammaBasis gamma_basis = GammaBasis::raw_adjacency;

  bool converged() const noexcept {
    const auto& g = gamma_basis == GammaBasis::raw_adjacency ? gamma_raw : gamma_normalized;
    return g.converged && (lambda_choice == LambdaChoice::spectral_gap || estimate.converged);
  }
};

/// manifest.json: tool, version, command, UTC timestamp and the resolved config.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const std::string& command);

SpectrumReport compute_spectrum(const WeightedGraph& graph, const ExperimentConfig& cfg);

/// Graph generated from the config spec and normalized per the config.
WeightedGraph build_graph(const ExperimentConfig& cfg);

struct ReplicateResult {
  std::size_t index = 0;  // 1-based
  std::uint64_t seed = 0;
  Trajectory trajectory;
  std::optional<BlowupDetection> detection;
  std::optional<EventTable> events;
};

/// Replicate k (1-based) runs with sim.seed + k.
std::vector<ReplicateResult> run_replicates(const WeightedGraph& graph, const ExperimentConfig& cfg);

struct EnsembleSummary {
  std::size_t replicates = 0;
  std::vector<double> times;  // prefix shared by every replicate
  std::vector<double> l2_mean, l2_var, energy_mean, energy_var, x_mean, x_var;
  double blowup_fraction = 0.0;
  std::optional<double> mean_t_star;
  std::size_t nonfinite_runs = 0;
  std::optional<double> mean_fitted_rate;
  double final_mean_l2_norm_sq = 0.0;
  // pooled drift statistics over t >= x_burn_in
  double x_burn_in = 0.0;
  double x_pooled_mean = 0.0;
  double x_pooled_variance = 0.0;
  std::optional<SurvivalCurve> survival;  // pooled over replicates
  std::optional<double> mean_event_time;  // restricted mean survival time
  std::optional<RegimeReport> regime;
};

EnsembleSummary summarize(const std::vector<ReplicateResult>& runs, const ExperimentConfig& cfg,
                          const SpectrumReport* spectrum);

struct ExperimentResult {
  WeightedGraph graph;
  SpectrumReport spectrum;
  EnsembleSummary summary;
};

/// Graph, spectrum, `replicates` simulations and the ensemble summary.
/// When write_files is set, writes under cfg.outputs.dir: manifest.json,
/// graph.txt, spectrum.json, regime.json, summary.json, ensemble.csv,
/// trajectories/, snapshots/ (optional) and survival.{csv,json}. The output
/// directory is checked before any simulation starts.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true,
                                const std::string& command = "simulate");

struct RegimeRow {
  double C_F = 0.0;
  double R = 0.0;
  Regime regime = Regime::critical;
  double blowup_fraction = 0.0;
  double mean_fitted_rate = 0.0;
  std::optional<double> mean_t_star;
  // share of replicates whose own trajectory behaves as the band predicts:
  // dissipative = negative rate and no crossing; amplifying/explosive =
  // positive rate or crossing; critical = no crossing
  double consistent_fraction = 0.0;
};

struct RegimeTable {
  SpectrumReport spectrum;
  std::vector<RegimeRow> rows;
  std::vector<std::string> warnings;
};

/// One ensemble per C_F value with the linear reaction (eta kept).
RegimeTable monte_carlo_regimes(const ExperimentConfig& cfg, const std::vector<double>& cf_grid,
                                bool write_files = true);

struct SweepCell {
  double x = 0.0;
  std::optional<double> y;
  double mean_event_time = 0.0;
  double blowup_fraction = 0.0;
  double final_mean_l2_norm_sq = 0.0;
};

std::vector<SweepCell> parameter_sweep(const ExperimentConfig& cfg, bool write_files = true);

struct TopologyRow {
  std::string model;
  GraphModelSpec spec;
  std::size_t graphs = 0;
  std::size_t lambda_nonconverged = 0;
  std::size_t gamma_nonconverged = 0;
  double lambda_mean = 0.0, lambda_sd = 0.0;
  double gamma_raw_mean = 0.0, gamma_raw_sd = 0.0;
  double gamma_normalized_mean = 0.0, gamma_normalized_sd = 0.0;
  std::optional<double> reference_lambda, reference_gamma;
  std::vector<double> gamma_raw;  // per seed, NaN when not converged
};

struct TopologyTable {
  std::vector<TopologyRow> rows;
  // Share of seed indices where raw Gamma orders BA > WS > ER; present when
  // all three models are in the table.
  std::optional<double> ordering_fraction;
};

/// Graph s of each model uses spec.seed + s. Lambda is computed on the
/// normalized graph; Gamma in both bases.
TopologyTable topology_comparison(const ExperimentConfig& cfg, bool write_files = true);

}  // namespace gehm
