#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gehm/dynamics.hpp"
#include "gehm/graph.hpp"
#include "gehm/operators.hpp"
#include "gehm/spectral.hpp"

namespace gehm {

// Edge-sum conventions used throughout:
//   E_p(u)        = (1/p) sum over unordered pairs of (w_ij + w_ji)/2 |u_i - u_j|^p
//   ||grad u||_p^p = sum over directed entries of w_ij |u_i - u_j|^p
// so that ||grad u||_p^p = 2 p E_p(u).

double energy_p(const WeightedGraph& graph, std::span<const double> u, double p);
double gradient_norm_p(const WeightedGraph& graph, std::span<const double> u, double p);

struct DissipationSample {
  double t = 0.0;
  double dE_dt = 0.0;    // forward difference between consecutive snapshots
  double bound = 0.0;    // -lambda_p ||grad u||_p^p + C_F ||u||_2^2 at the left snapshot
  double residual = 0.0; // dE_dt - bound
};

/// Empirical check of the energy dissipation inequality. The residual plays
/// the role of the interaction term, which has no closed form.
/// InsufficientDataError when fewer than two snapshots exist.
std::vector<DissipationSample> dissipation_residual(const WeightedGraph& graph,
                                                    const Trajectory& traj, double lambda_p,
                                                    double C_F);

enum class Regime { dissipative, critical, amplifying, explosive };
std::string to_string(Regime r);

struct RegimeEvidence {
  double fitted_rate = 0.0;
  std::optional<double> t_star;
};

struct RegimeReport {
  double R = 0.0;
  Regime regime = Regime::critical;
  double delta_band = 0.05;
  double lambda_p = 0.0;
  double gamma = 0.0;
  GammaBasis gamma_basis = GammaBasis::raw_adjacency;
  double C_F = 0.0;
  std::string C_F_source = "linear";
  std::optional<RegimeEvidence> evidence;
};

/// dissipative: R < -delta; critical: |R| <= delta; amplifying: R > delta.
/// Observed threshold crossing in the evidence overrides the band and gives
/// explosive. Only R, regime, delta_band and evidence are filled.
RegimeReport classify_regime(double R, double delta_band, std::optional<RegimeEvidence> evidence);

/// classify_regime(regime_index(C_F, lambda_p, gamma), ...) with the
/// spectral inputs recorded in the report.
RegimeReport regime_report(double C_F, double lambda_p, double gamma, GammaBasis basis,
                           double delta_band, std::optional<RegimeEvidence> evidence);

/// Reaction slope entering the regime index. For the modulated form this is
/// sup |phi(x)| over x in mu +- 3 stationary standard deviations.
struct EffectiveSlope {
  double C_F = 0.0;
  std::string source;
};
EffectiveSlope effective_reaction_slope(const ReactionSpec& reaction, const OuParams& ou);

struct Amplification {
  double value = 0.0;
  std::optional<double> critical_gap;  // value - lambda_p
};

/// C_F ||grad u||_2^2 (directed) + gamma E[X^2] for one sample; x^2 stands in
/// for the second moment when none is given. UnsupportedFormError for the
/// modulated reaction.
Amplification amplification_functional(const WeightedGraph& graph, std::span<const double> u,
                                       double x, const ReactionSpec& reaction, double gamma,
                                       std::optional<double> x_second_moment,
                                       std::optional<double> lambda_p = std::nullopt);

// ---------------------------------------------------------------------------
// Time-to-event

enum class EventStatus { event, censored };
enum class CrossingDirection { above, below };
CrossingDirection parse_direction(const std::string& name);
std::string to_string(CrossingDirection d);

struct EventRow {
  std::size_t node = 0;
  double time = 0.0;
  EventStatus status = EventStatus::censored;

  friend bool operator==(const EventRow&, const EventRow&) = default;
};

struct EventTable {
  std::vector<EventRow> rows;
};

/// First snapshot time at which u_i >= threshold (above) or <= threshold
/// (below); nodes that never get there are censored at the last snapshot.
EventTable extract_event_times(const Trajectory& traj, double threshold, CrossingDirection direction);

enum class SurvivalEstimator { kaplan_meier, nelson_aalen };
SurvivalEstimator parse_estimator(const std::string& name);
std::string to_string(SurvivalEstimator e);

struct SurvivalCurve {
  SurvivalEstimator estimator = SurvivalEstimator::kaplan_meier;
  std::vector<double> times;              // distinct observed times
  std::vector<double> survival;           // KM product, or exp(-H) for nelson_aalen
  std::vector<double> cumulative_hazard;  // Nelson-Aalen sum d_k / n_k
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;
  // d_k / (n_k * gap_k), gap_k measured from the previous event time (or 0);
  // NaN where gap_k is zero.
  std::vector<double> baseline_hazard;
};

/// InsufficientDataError for an empty table.
SurvivalCurve estimate_survival(const EventTable& events, SurvivalEstimator estimator);

/// Integral of the survival step function from 0 to tau (defaults to the
/// last curve time).
double restricted_mean_survival(const SurvivalCurve& curve, std::optional<double> tau = std::nullopt);

}  // namespace gehm
