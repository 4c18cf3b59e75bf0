#include "gehm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gehm/error.hpp"
#include "gehm/simd/kernels.hpp"

namespace gehm {

double gradient_norm_p(const WeightedGraph& graph, std::span<const double> u, double p) {
  if (u.size() != graph.nodes()) throw InputError("vector length does not match graph");
  return simd::active_kernels().edge_power_sum(graph.csr(), u, p);
}

double energy_p(const WeightedGraph& graph, std::span<const double> u, double p) {
  return gradient_norm_p(graph, u, p) / (2.0 * p);
}

std::vector<DissipationSample> dissipation_residual(const WeightedGraph& graph,
                                                    const Trajectory& traj, double lambda_p,
                                                    double C_F) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) {
    throw InsufficientDataError("dissipation residual needs at least two snapshots");
  }
  const auto& kernels = simd::active_kernels();
  std::vector<DissipationSample> out;
  out.reserve(snaps.size() - 1);
  double e_left = energy_p(graph, snaps[0].u, traj.p);
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const double e_right = energy_p(graph, snaps[k + 1].u, traj.p);
    DissipationSample s;
    s.t = snaps[k].t;
    s.dE_dt = (e_right - e_left) / (snaps[k + 1].t - snaps[k].t);
    s.bound = -lambda_p * gradient_norm_p(graph, snaps[k].u, traj.p) +
              C_F * kernels.dot(snaps[k].u, snaps[k].u);
    s.residual = s.dE_dt - s.bound;
    out.push_back(s);
    e_left = e_right;
  }
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::dissipative: return "dissipative";
    case Regime::critical: return "critical";
    case Regime::amplifying: return "amplifying";
    case Regime::explosive: return "explosive";
  }
  return "critical";
}

RegimeReport classify_regime(double R, double delta_band, std::optional<RegimeEvidence> evidence) {
  if (!(delta_band > 0.0)) throw ParameterError("delta_band must be > 0");
  if (!std::isfinite(R)) throw ParameterError("regime index must be finite");
  RegimeReport rep;
  rep.R = R;
  rep.delta_band = delta_band;
  rep.evidence = evidence;
  if (evidence && evidence->t_star) {
    rep.regime = Regime::explosive;
  } else if (R < -delta_band) {
    rep.regime = Regime::dissipative;
  } else if (R > delta_band) {
    rep.regime = Regime::amplifying;
  } else {
    rep.regime = Regime::critical;
  }
  return rep;
}

RegimeReport regime_report(double C_F, double lambda_p, double gamma, GammaBasis basis,
                           double delta_band, std::optional<RegimeEvidence> evidence) {
  RegimeReport rep = classify_regime(regime_index(C_F, lambda_p, gamma), delta_band, evidence);
  rep.C_F = C_F;
  rep.lambda_p = lambda_p;
  rep.gamma = gamma;
  rep.gamma_basis = basis;
  return rep;
}

EffectiveSlope effective_reaction_slope(const ReactionSpec& reaction, const OuParams& ou) {
  if (const auto* lin = std::get_if<LinearReaction>(&reaction)) return {lin->C_F, "linear"};
  const auto& mod = std::get<ModulatedReaction>(reaction);
  const double sd = std::sqrt(ou_stationary_variance(ou.kappa, ou.xi));
  double sup = 0.0;
  constexpr int kPoints = 101;
  for (int k = 0; k < kPoints; ++k) {
    const double x = ou.mu - 3.0 * sd + 6.0 * sd * k / (kPoints - 1);
    sup = std::max(sup, std::fabs(mod.phi(x)));
  }
  return {sup, "sup_abs_phi_stationary_band"};
}

Amplification amplification_functional(const WeightedGraph& graph, std::span<const double> u,
                                       double x, const ReactionSpec& reaction, double gamma,
                                       std::optional<double> x_second_moment,
                                       std::optional<double> lambda_p) {
  const auto* lin = std::get_if<LinearReaction>(&reaction);
  if (!lin) throw UnsupportedFormError("amplification functional requires the linear reaction form");
  Amplification a;
  a.value = lin->C_F * gradient_norm_p(graph, u, 2.0) + gamma * x_second_moment.value_or(x * x);
  if (lambda_p) a.critical_gap = a.value - *lambda_p;
  return a;
}

// ---------------------------------------------------------------------------

CrossingDirection parse_direction(const std::string& name) {
  if (name == "above") return CrossingDirection::above;
  if (name == "below") return CrossingDirection::below;
  throw ConfigError({"unknown crossing direction '" + name + "'"});
}

std::string to_string(CrossingDirection d) {
  return d == CrossingDirection::above ? "above" : "below";
}

EventTable extract_event_times(const Trajectory& traj, double threshold, CrossingDirection direction) {
  if (traj.snapshots.empty()) throw InsufficientDataError("event extraction needs snapshots");
  const std::size_t n = traj.snapshots.front().u.size();
  EventTable table;
  table.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EventRow row{i, traj.snapshots.back().t, EventStatus::censored};
    for (const auto& s : traj.snapshots) {
      const double v = s.u[i];
      const bool hit = direction == CrossingDirection::above ? v >= threshold : v <= threshold;
      if (hit) {
        row.time = s.t;
        row.status = EventStatus::event;
        break;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

SurvivalEstimator parse_estimator(const std::string& name) {
  if (name == "kaplan_meier") return SurvivalEstimator::kaplan_meier;
  if (name == "nelson_aalen") return SurvivalEstimator::nelson_aalen;
  throw ConfigError({"unknown survival estimator '" + name + "'"});
}

std::string to_string(SurvivalEstimator e) {
  return e == SurvivalEstimator::kaplan_meier ? "kaplan_meier" : "nelson_aalen";
}

SurvivalCurve estimate_survival(const EventTable& events, SurvivalEstimator estimator) {
  if (events.rows.empty()) throw InsufficientDataError("survival estimation needs at least one row");
  std::vector<EventRow> rows = events.rows;
  for (const auto& r : rows) {
    if (!(r.time >= 0.0) || !std::isfinite(r.time)) throw InputError("event times must be finite and >= 0");
  }
  std::sort(rows.begin(), rows.end(), [](const EventRow& a, const EventRow& b) { return a.time < b.time; });

  SurvivalCurve c;
  c.estimator = estimator;
  std::size_t at_risk = rows.size();
  double km = 1.0;
  double na = 0.0;
  double last_event_time = 0.0;
  for (std::size_t k = 0; k < rows.size();) {
    const double t = rows[k].time;
    std::size_t d = 0, removed = 0;
    while (k < rows.size() && rows[k].time == t) {
      if (rows[k].status == EventStatus::event) ++d;
      ++removed;
      ++k;
    }
    const double frac = static_cast<double>(d) / static_cast<double>(at_risk);
    km *= 1.0 - frac;
    na += frac;
    double hazard = 0.0;
    if (d > 0) {
      const double gap = t - last_event_time;
      hazard = gap > 0.0 ? frac / gap : std::numeric_limits<double>::quiet_NaN();
      last_event_time = t;
    }
    c.times.push_back(t);
    c.survival.push_back(estimator == SurvivalEstimator::kaplan_meier ? km : std::exp(-na));
    c.cumulative_hazard.push_back(na);
    c.at_risk.push_back(at_risk);
    c.events.push_back(d);
    c.baseline_hazard.push_back(hazard);
    at_risk -= removed;
  }
  return c;
}

double restricted_mean_survival(const SurvivalCurve& curve, std::optional<double> tau) {
  if (curve.times.empty()) return 0.0;
  const double end = tau.value_or(curve.times.back());
  double area = 0.0;
  double prev_t = 0.0;
  double prev_s = 1.0;
  for (std::size_t k = 0; k < curve.times.size() && curve.times[k] < end; ++k) {
    area += prev_s * (curve.times[k] - prev_t);
    prev_t = curve.times[k];
    prev_s = curve.survival[k];
  }
  if (end > prev_t) area += prev_s * (end - prev_t);
  return area;
}

}  // namespace gehm
