#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gehm/diagnostics.hpp"
#include "gehm/error.hpp"
#include "support.hpp"

using namespace gehm;
using gehm::testing::random_connected_graph;

namespace {

EventTable table(std::initializer_list<std::pair<double, bool>> rows) {
  EventTable t;
  std::size_t i = 0;
  for (const auto& [time, event] : rows) t.rows.push_back({i++, time, event ? EventStatus::event : EventStatus::censored});
  return t;
}

EventTable random_table(std::mt19937_64& rng, std::size_t n, double censor_prob) {
  std::uniform_int_distribution<int> time(0, 12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EventTable t;
  for (std::size_t i = 0; i < n; ++i) {
    t.rows.push_back({i, 0.5 * time(rng), unif(rng) < censor_prob ? EventStatus::censored : EventStatus::event});
  }
  return t;
}

SimulationConfig quiet(double p) {
  SimulationConfig cfg;
  cfg.p = p;
  cfg.eps = 0.0;
  cfg.noise = AdditiveNoise{0.0};
  cfg.ou.xi = 0.0;
  return cfg;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("energy on small inputs") {
  const auto g = gehm::testing::path_graph(2);
  CHECK(energy_p(g, std::vector<double>{1.0, 0.0}, 3.0) == doctest::Approx(1.0 / 3.0));
  CHECK(gradient_norm_p(g, std::vector<double>{1.0, 0.0}, 3.0) == doctest::Approx(2.0));
  CHECK(energy_p(g, std::vector<double>{0.7, 0.7}, 3.0) == 0.0);
}

TEST_CASE("energy is p-homogeneous") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_connected_graph(3 + t % 12, 0.3, rng);
    const auto u = gehm::testing::random_vector(g.nodes(), rng);
    const double p = 1.5 + (t % 5) * 0.5;
    const double k = c(rng);
    auto cu = u;
    for (double& v : cu) v *= k;
    CHECK(energy_p(g, cu, p) == doctest::Approx(std::pow(std::fabs(k), p) * energy_p(g, u, p)).epsilon(1e-10));
  }
}

TEST_CASE("energy symmetrizes row-normalized weights") {
  std::mt19937_64 rng(62);
  const auto g = normalize_weights(random_connected_graph(9, 0.4, rng), Normalization::row);
  const auto u = gehm::testing::random_vector(9, rng);
  double ref = 0.0;
  for (const auto& e : g.edges()) {
    if (e.i < e.j) ref += 0.5 * (e.w + g.weight(e.j, e.i)) * std::pow(std::fabs(u[e.i] - u[e.j]), 3.0);
  }
  CHECK(energy_p(g, u, 3.0) == doctest::Approx(ref / 3.0).epsilon(1e-12));
}

TEST_CASE("dissipation residual") {
  const auto g = gehm::testing::cycle_graph(8);
  auto cfg = quiet(3.0);
  cfg.init = {InitKind::constant, 0.0, {}};
  cfg.blowup_threshold = 1.0;
  cfg.snapshot_stride = 5;
  cfg.horizon = 0.1;
  for (const auto& s : dissipation_residual(g, simulate(g, cfg), 2.0, 0.0)) CHECK(s.residual == 0.0);

  std::mt19937_64 rng(63);
  cfg.init = {InitKind::custom, 0.0, gehm::testing::random_vector(8, rng)};
  cfg.blowup_threshold.reset();
  cfg.reaction = LinearReaction{0.3, 0.0};
  const auto traj = simulate(g, cfg);
  for (const auto& s : dissipation_residual(g, traj, 1.0, 0.3)) {
    double norm_sq = 0.0;
    for (const auto& snap : traj.snapshots) {
      if (snap.t == s.t) for (double v : snap.u) norm_sq += v * v;
    }
    CHECK(s.dE_dt <= 0.3 * norm_sq);
  }

  std::vector<double> first;
  for (std::size_t stride : {8, 4, 2, 1}) {
    cfg.snapshot_stride = stride;
    first.push_back(dissipation_residual(g, simulate(g, cfg), 1.0, 0.3).front().residual);
  }
  CHECK(std::fabs(first[0] - first[3]) > std::fabs(first[1] - first[3]));
  CHECK(std::fabs(first[1] - first[3]) > std::fabs(first[2] - first[3]));

  Trajectory bare;
  CHECK_THROWS_AS(dissipation_residual(g, bare, 1.0, 0.0), InsufficientDataError);
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(-1.0, 0.05, std::nullopt).regime == Regime::dissipative);
  CHECK(classify_regime(0.0, 0.05, std::nullopt).regime == Regime::critical);
  CHECK(classify_regime(0.05, 0.05, std::nullopt).regime == Regime::critical);
  CHECK(classify_regime(0.2, 0.05, std::nullopt).regime == Regime::amplifying);
  const auto rep = regime_report(0.5, 0.41, 1.87, GammaBasis::raw_adjacency, 0.05, RegimeEvidence{3.0, 1.2});
  CHECK(rep.R == doctest::Approx(1.96));
  CHECK(rep.regime == Regime::explosive);
  CHECK(rep.evidence->t_star == 1.2);
  CHECK_THROWS_AS(classify_regime(0.0, 0.0, std::nullopt), ParameterError);
}

TEST_CASE("classification survives rescaling that keeps band membership") {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    const double cf = unif(rng), lam = std::fabs(unif(rng)), gam = std::fabs(unif(rng));
    const double c = 1.0 + std::fabs(unif(rng));
    const double R = regime_index(cf, lam, gam);
    const double Rc = regime_index(c * cf, c * lam, c * gam);
    const bool same_band = (R < -0.05) == (Rc < -0.05) && (R > 0.05) == (Rc > 0.05);
    if (!same_band) continue;
    CHECK(classify_regime(R, 0.05, std::nullopt).regime == classify_regime(Rc, 0.05, std::nullopt).regime);
  }
}

TEST_CASE("amplification functional") {
  const auto g = gehm::testing::path_graph(2);
  CHECK(amplification_functional(g, std::vector<double>{0.2, 0.2}, 0.0, LinearReaction{1.0, 0.0}, 1.0, 0.0).value == 0.0);
  CHECK(amplification_functional(g, std::vector<double>{1.0, 0.0}, 5.0, LinearReaction{1.0, 0.0}, 0.0, std::nullopt).value ==
        doctest::Approx(2.0));
  const auto a = amplification_functional(g, std::vector<double>{1.0, 0.0}, 0.0, LinearReaction{0.0, 0.0}, 1.87,
                                          ou_stationary_variance(0.3, 0.1), 0.41);
  CHECK(a.value == doctest::Approx(0.031167).epsilon(1e-4));
  CHECK(*a.critical_gap == doctest::Approx(0.031167 - 0.41).epsilon(1e-4));
  CHECK_THROWS_AS(amplification_functional(g, std::vector<double>{1.0, 0.0}, 0.0, ModulatedReaction{}, 0.0, 0.0),
                  UnsupportedFormError);
}

TEST_CASE("effective slope of the modulated form") {
  const OuParams ou{0.3, 0.0, 0.1, 0.0};
  CHECK(effective_reaction_slope(LinearReaction{0.7, 0.1}, ou).C_F == 0.7);
  const auto s = effective_reaction_slope(ModulatedReaction{{ScalarMapKind::identity, 0.0}, {}}, ou);
  CHECK(s.C_F == doctest::Approx(3.0 * std::sqrt(ou_stationary_variance(0.3, 0.1))));
  CHECK(s.source != "linear");
}

TEST_CASE("event extraction") {
  Trajectory traj;
  for (int k = 0; k < 5; ++k) traj.snapshots.push_back({std::size_t(k), 0.1 * k, {0.0, 0.1 * k, -1.0}});
  const auto ev = extract_event_times(traj, 0.2, CrossingDirection::above);
  CHECK(ev.rows[0].status == EventStatus::censored);
  CHECK(ev.rows[0].time == doctest::Approx(0.4));
  CHECK(ev.rows[1].status == EventStatus::event);
  CHECK(ev.rows[1].time == traj.snapshots[2].t);
  const auto below = extract_event_times(traj, -0.5, CrossingDirection::below);
  CHECK(below.rows[2].status == EventStatus::event);
  CHECK(below.rows[2].time == 0.0);
  CHECK_THROWS_AS(extract_event_times(Trajectory{}, 0.1, CrossingDirection::above), InsufficientDataError);
}

TEST_CASE("events on a symmetric amplifying run are ordered by initial value") {
  const auto g = gehm::testing::complete_graph(5);
  auto cfg = quiet(2.0);
  cfg.reaction = LinearReaction{8.0, 0.0};
  cfg.init = {InitKind::custom, 0.0, {0.05, 0.3, 0.1, 0.2, 0.15}};
  cfg.snapshot_stride = 1;
  cfg.horizon = 2.0;
  const auto ev = extract_event_times(simulate(g, cfg), 1.0, CrossingDirection::above);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (cfg.init.values[i] > cfg.init.values[j] && ev.rows[j].status == EventStatus::event) {
        CHECK(ev.rows[i].status == EventStatus::event);
        CHECK(ev.rows[i].time <= ev.rows[j].time);
      }
    }
  }
}

TEST_CASE("kaplan meier on three observations") {
  const auto c = estimate_survival(table({{1.0, true}, {2.0, false}, {3.0, true}}), SurvivalEstimator::kaplan_meier);
  REQUIRE(c.times == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.survival[0] == doctest::Approx(2.0 / 3.0));
  CHECK(c.survival[1] == doctest::Approx(2.0 / 3.0));
  // the last subject at risk fails, so the product limit reaches zero
  CHECK(c.survival[2] == 0.0);
  CHECK(c.at_risk == std::vector<std::size_t>{3, 2, 1});
  CHECK(c.cumulative_hazard[2] == doctest::Approx(1.0 / 3.0 + 1.0));
}

TEST_CASE("single event") {
  const auto km = estimate_survival(table({{1.0, true}}), SurvivalEstimator::kaplan_meier);
  CHECK(km.survival[0] == 0.0);
  CHECK(km.cumulative_hazard[0] == 1.0);
  const auto na = estimate_survival(table({{1.0, true}}), SurvivalEstimator::nelson_aalen);
  CHECK(na.survival[0] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("all censored gives flat survival") {
  const auto c = estimate_survival(table({{1.0, false}, {2.0, false}}), SurvivalEstimator::kaplan_meier);
  for (double s : c.survival) CHECK(s == 1.0);
  for (double h : c.cumulative_hazard) CHECK(h == 0.0);
  CHECK_THROWS_AS(estimate_survival(EventTable{}, SurvivalEstimator::kaplan_meier), InsufficientDataError);
}

TEST_CASE("baseline hazard and tied times") {
  const auto c = estimate_survival(table({{2.0, true}, {2.0, true}, {4.0, true}, {5.0, false}}),
                                   SurvivalEstimator::nelson_aalen);
  REQUIRE(c.times == std::vector<double>{2.0, 4.0, 5.0});
  CHECK(c.events == std::vector<std::size_t>{2, 1, 0});
  CHECK(c.baseline_hazard[0] == doctest::Approx(0.5 / 2.0));
  CHECK(c.baseline_hazard[1] == doctest::Approx(0.5 / 2.0));
  CHECK(c.baseline_hazard[2] == 0.0);
  const auto zero = estimate_survival(table({{0.0, true}, {1.0, false}}), SurvivalEstimator::nelson_aalen);
  CHECK(std::isnan(zero.baseline_hazard[0]));
}

TEST_CASE("kaplan meier without censoring is the empirical survival function") {
  std::mt19937_64 rng(65);
  for (int t = 0; t < 200; ++t) {
    const auto tab = random_table(rng, 1 + t % 40, 0.0);
    const auto c = estimate_survival(tab, SurvivalEstimator::kaplan_meier);
    for (std::size_t k = 0; k < c.times.size(); ++k) {
      const auto surviving = std::count_if(tab.rows.begin(), tab.rows.end(),
                                           [&](const EventRow& r) { return r.time > c.times[k]; });
      CHECK(c.survival[k] == doctest::Approx(double(surviving) / double(tab.rows.size())).epsilon(1e-12));
    }
  }
}

TEST_CASE("survival curves are monotone and bounded") {
  std::mt19937_64 rng(66);
  for (int t = 0; t < 300; ++t) {
    const auto tab = random_table(rng, 1 + t % 50, 0.4);
    for (auto est : {SurvivalEstimator::kaplan_meier, SurvivalEstimator::nelson_aalen}) {
      const auto c = estimate_survival(tab, est);
      for (std::size_t k = 0; k < c.times.size(); ++k) {
        CHECK(c.survival[k] >= 0.0);
        CHECK(c.survival[k] <= 1.0);
        if (k > 0) {
          CHECK(c.times[k] > c.times[k - 1]);
          CHECK(c.survival[k] <= c.survival[k - 1]);
          CHECK(c.cumulative_hazard[k] >= c.cumulative_hazard[k - 1]);
        }
      }
    }
  }
}

TEST_CASE("nelson aalen tracks -log kaplan meier") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    EventTable tab;
    for (std::size_t i = 0; i < 200; ++i) {
      tab.rows.push_back({i, 10.0 * unif(rng), unif(rng) < 0.3 ? EventStatus::censored : EventStatus::event});
    }
    const auto c = estimate_survival(tab, SurvivalEstimator::kaplan_meier);
    double bound = 0.0;
    for (std::size_t k = 0; k < c.times.size(); ++k) {
      const double d = double(c.events[k]), n = double(c.at_risk[k]);
      if (d / n > 0.1) break;
      bound += d / (n * n);
      CHECK(std::fabs(-std::log(c.survival[k]) - c.cumulative_hazard[k]) <= bound + 1e-12);
    }
  }
}

TEST_CASE("restricted mean survival") {
  const auto c = estimate_survival(table({{1.0, true}, {2.0, false}, {3.0, true}}), SurvivalEstimator::kaplan_meier);
  CHECK(restricted_mean_survival(c) == doctest::Approx(1.0 + 2.0 / 3.0 * 2.0));
  CHECK(restricted_mean_survival(c, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("names round trip") {
  for (auto e : {SurvivalEstimator::kaplan_meier, SurvivalEstimator::nelson_aalen}) CHECK(parse_estimator(to_string(e)) == e);
  for (auto d : {CrossingDirection::above, CrossingDirection::below}) CHECK(parse_direction(to_string(d)) == d);
  CHECK_THROWS_AS(parse_estimator("cox"), ConfigError);
}

}  // TEST_SUITE
