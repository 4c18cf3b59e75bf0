#include "doctest.h"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "gehm/error.hpp"
#include "gehm/experiment.hpp"
#include "support.hpp"

using namespace gehm;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.graph = {BarabasiAlbert{2}, 12, 7};
  cfg.sim.horizon = 0.2;
  cfg.replicates = 3;
  cfg.outputs.dir = out.string();
  return cfg;
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("parallel_for visits each index once") {
  for (std::size_t workers : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_WITH_AS(parallel_for(10, 3,
                                    [](std::size_t i) {
                                      if (i == 4 || i == 8) throw std::runtime_error("fail " + std::to_string(i));
                                    }),
                       "fail 4", std::runtime_error);
}

TEST_CASE("replicates use their own seeds and ignore the worker count") {
  gehm::testing::TempDir dir("rep");
  auto cfg = small_config(dir.path());
  const auto graph = build_graph(cfg);
  const auto a = run_replicates(graph, cfg);
  cfg.workers = 3;
  const auto b = run_replicates(graph, cfg);
  REQUIRE(a.size() == 3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].index == k + 1);
    CHECK(a[k].seed == cfg.sim.seed + k + 1);
    CHECK(a[k].trajectory.l2_norm_sq == b[k].trajectory.l2_norm_sq);
    CHECK(a[k].trajectory.x_path == b[k].trajectory.x_path);
  }
  CHECK(a[0].trajectory.l2_norm_sq.back() != a[1].trajectory.l2_norm_sq.back());
}

TEST_CASE("run_experiment writes a reproducible result set") {
  gehm::testing::TempDir dir("run");
  auto cfg = small_config(dir / "a");
  cfg.sim.snapshot_stride = 50;
  cfg.outputs.snapshots = true;
  const auto res = run_experiment(cfg);
  CHECK(res.summary.replicates == 3);
  CHECK(res.summary.regime.has_value());
  CHECK(res.spectrum.converged());
  for (const char* name : {"manifest.json", "graph.txt", "spectrum.json", "regime.json", "summary.json", "ensemble.csv",
                           "trajectories/r0001.csv", "trajectories/r0003.json"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / name), name);
  }
  CHECK(fs::is_directory(dir / "a" / "snapshots" / "r0002"));

  cfg.outputs.dir = (dir / "b").string();
  cfg.workers = 2;
  run_experiment(cfg);
  const auto fa = files_under(dir / "a");
  CHECK(fa == files_under(dir / "b"));
  for (const auto& f : fa) {
    if (f == "manifest.json") continue;
    CHECK_MESSAGE(gehm::testing::slurp(dir / "a" / f.string()) == gehm::testing::slurp(dir / "b" / f.string()),
                  f.string());
  }
}

TEST_CASE("an unusable output directory fails before simulating") {
  gehm::testing::TempDir dir("io");
  gehm::testing::spit(dir / "blocker", "x");
  auto cfg = small_config(dir / "blocker" / "out");
  CHECK_THROWS_AS(run_experiment(cfg), IoError);
  CHECK_NOTHROW(run_experiment(cfg, false));
}

TEST_CASE("pooled drift variance approaches the OU stationary value") {
  ExperimentConfig cfg;
  cfg.graph = {BarabasiAlbert{2}, 8, 3};
  cfg.sim.noise = AdditiveNoise{0.0};
  cfg.sim.init = {InitKind::constant, 0.0, {}};
  cfg.sim.dt = 1e-2;
  cfg.sim.horizon = 40.0;
  cfg.replicates = 100;
  const auto res = run_experiment(cfg, false);
  const double target = cfg.sim.ou.xi * cfg.sim.ou.xi / (2.0 * cfg.sim.ou.kappa);
  CHECK(res.summary.x_burn_in == doctest::Approx(20.0));
  CHECK(std::fabs(res.summary.x_pooled_mean) < 0.05);
  CHECK(res.summary.x_pooled_variance == doctest::Approx(target).epsilon(0.2));
}

TEST_CASE("regime table on a complete graph") {
  gehm::testing::TempDir dir("reg");
  ExperimentConfig cfg;
  cfg.graph = {ErdosRenyi{1.0}, 10, 1};
  cfg.sim.p = 2.0;
  cfg.spectral.gamma_basis = GammaBasis::normalized_W;
  cfg.sim.noise = AdditiveNoise{0.0};
  cfg.sim.horizon = 1.0;
  cfg.replicates = 2;
  cfg.outputs.dir = dir.path().string();
  const auto table = monte_carlo_regimes(cfg, {-3.0, 3.0});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1].R - table.rows[0].R == doctest::Approx(6.0));
  CHECK(table.rows[0].regime == Regime::dissipative);
  CHECK(table.rows[0].mean_fitted_rate < 0.0);
  CHECK(table.rows[1].mean_fitted_rate > table.rows[0].mean_fitted_rate);
  CHECK(table.rows[0].consistent_fraction == 1.0);
  CHECK(fs::exists(dir / "regimes.csv"));

  cfg.sim.reaction = ModulatedReaction{};
  CHECK_THROWS_AS(monte_carlo_regimes(cfg, {0.0}, false), ConfigError);
}

TEST_CASE("parameter sweep") {
  gehm::testing::TempDir dir("sweep");
  auto cfg = small_config(dir.path());
  cfg.sweep = SweepSpec{{"sim.reaction.C_F", {0.4}}, std::nullopt};
  const auto one = parameter_sweep(cfg, false);
  REQUIRE(one.size() == 1);
  const auto direct = run_experiment(with_override(cfg, "sim.reaction.C_F", 0.4), false);
  CHECK(one[0].final_mean_l2_norm_sq == direct.summary.final_mean_l2_norm_sq);
  CHECK(one[0].blowup_fraction == direct.summary.blowup_fraction);

  cfg.sweep = SweepSpec{{"sim.reaction.C_F", {-1.0, 0.0, 1.0}}, SweepAxis{"sim.ou.kappa", {0.1, 0.3, 0.9}}};
  const auto grid = parameter_sweep(cfg);
  REQUIRE(grid.size() == 9);
  CHECK(fs::exists(dir / "sweep.csv"));
  for (std::size_t yi = 0; yi < 3; ++yi) {
    std::vector<double> col;
    for (const auto& c : grid) {
      if (c.y && *c.y == cfg.sweep->y->values[yi]) col.push_back(c.final_mean_l2_norm_sq);
    }
    REQUIRE(col.size() == 3);
    CHECK(col[0] < col[1]);
    CHECK(col[1] < col[2]);
  }
}

TEST_CASE("topology comparison on a ring") {
  gehm::testing::TempDir dir("topo");
  ExperimentConfig cfg;
  cfg.sim.p = 2.0;
  cfg.outputs.dir = dir.path().string();
  cfg.topologies.models = {{WattsStrogatz{2, 0.0}, 6, 1}};
  cfg.topologies.seeds = 3;
  const auto table = topology_comparison(cfg);
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  CHECK(row.graphs == 3);
  CHECK(row.lambda_nonconverged == 0);
  // row-normalized 6-cycle: L = I - W, eigenvalues 1 - cos(2 pi k / 6)
  CHECK(row.lambda_mean == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(row.gamma_raw_mean == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(row.gamma_normalized_mean == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(row.lambda_sd < 1e-6);
  CHECK(row.gamma_raw_sd < 1e-6);
  CHECK_FALSE(table.ordering_fraction.has_value());
  CHECK(fs::exists(dir / "topologies.csv"));

  cfg.topologies.seeds = 1;
  const auto single = topology_comparison(cfg, false);
  CHECK(single.rows[0].gamma_raw_sd == 0.0);
}

}  // TEST_SUITE
