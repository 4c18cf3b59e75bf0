#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gehm/config.hpp"
#include "gehm/error.hpp"
#include "gehm/experiment.hpp"
#include "gehm/output.hpp"
#include "gehm/simd/kernels.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNonConvergence = 3;
constexpr int kIoError = 4;

constexpr const char* kOutputEnv = "GEHM_OUTPUT_DIR";

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> replicates;
  bool force = false;
};

// --out beats the environment, which beats the config file.
gehm::ExperimentConfig load(const CommonOptions& o) {
  gehm::ExperimentConfig cfg = gehm::load_config(o.config);
  if (const char* env = std::getenv(kOutputEnv); env && *env) cfg.outputs.dir = env;
  if (!o.out.empty()) cfg.outputs.dir = o.out;
  if (o.workers) {
    if (*o.workers == 0) throw gehm::ConfigError({"--workers must be >= 1"});
    cfg.workers = *o.workers;
  }
  if (o.replicates) {
    if (*o.replicates == 0) throw gehm::ConfigError({"--replicates must be >= 1"});
    cfg.replicates = *o.replicates;
  }
  if (o.force) cfg.sim.allow_unstable_dt = true;
  return cfg;
}

void add_common(CLI::App* sub, CommonOptions& o, bool with_replicates) {
  sub->add_option("config", o.config, "experiment config file")->required();
  sub->add_option("-o,--out", o.out, "output directory");
  sub->add_option("-w,--workers", o.workers, "worker threads");
  if (with_replicates) sub->add_option("-r,--replicates", o.replicates, "replicate count");
  sub->add_flag("--force", o.force, "run even when the step size exceeds the stability estimate");
}

void report_spectrum(const gehm::SpectrumReport& s) {
  std::printf("lambda_p %s (%s, %zu iterations)\n", gehm::format_double(s.estimate.lambda_p).c_str(),
              s.estimate.converged ? "converged" : "not converged", s.estimate.iterations);
  std::printf("gamma raw_adjacency %s\n", gehm::format_double(s.gamma_raw.rho).c_str());
  std::printf("gamma normalized_W %s\n", gehm::format_double(s.gamma_normalized.rho).c_str());
  if (s.algebraic_connectivity) {
    std::printf("algebraic_connectivity %s\n", gehm::format_double(*s.algebraic_connectivity).c_str());
  }
}

int non_convergence(const std::string& what) {
  std::fprintf(stderr, "gehm: %s did not converge\n", what.c_str());
  return kNonConvergence;
}

int cmd_simulate(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto res = gehm::run_experiment(cfg, true, "simulate");
  report_spectrum(res.spectrum);
  const auto& s = res.summary;
  std::printf("replicates %zu blowup_fraction %s\n", s.replicates, gehm::format_double(s.blowup_fraction).c_str());
  if (s.regime) std::printf("regime %s R %s\n", gehm::to_string(s.regime->regime).c_str(),
                            gehm::format_double(s.regime->R).c_str());
  std::printf("output %s\n", cfg.outputs.dir.c_str());
  if (s.nonfinite_runs > 0) {
    std::fprintf(stderr, "gehm: %zu replicate(s) produced non-finite states\n", s.nonfinite_runs);
    return kNonConvergence;
  }
  if (!res.spectrum.converged()) return non_convergence("spectral estimation");
  return kOk;
}

int cmd_spectrum(const CommonOptions& o) {
  const auto cfg = load(o);
  gehm::prepare_output_dir(cfg.outputs.dir);
  const auto graph = gehm::build_graph(cfg);
  const auto s = gehm::compute_spectrum(graph, cfg);
  report_spectrum(s);
  const std::filesystem::path dir = cfg.outputs.dir;
  json j = {{"lambda_p_dominant", gehm::to_json(s.estimate, true)},
            {"gamma_raw_adjacency", gehm::to_json(s.gamma_raw)},
            {"gamma_normalized_W", gehm::to_json(s.gamma_normalized)},
            {"algebraic_connectivity",
             s.algebraic_connectivity ? json(*s.algebraic_connectivity) : json(nullptr)},
            {"lambda_choice", gehm::to_string(s.lambda_choice)},
            {"lambda_used", gehm::number_or_null(s.lambda_used)},
            {"gamma_basis", gehm::to_string(s.gamma_basis)},
            {"gamma_used", gehm::number_or_null(s.gamma_used)},
            {"converged", s.converged()}};
  gehm::write_json(dir / "spectrum.json", j);
  gehm::write_manifest(dir, cfg, "spectrum");
  if (!s.converged()) return non_convergence("spectral estimation");
  return kOk;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw gehm::ConfigError({"--cf-grid: not a number: '" + item + "'"});
    }
  }
  return out;
}

int cmd_regimes(const CommonOptions& o, const std::string& grid_text) {
  const auto cfg = load(o);
  const auto grid = grid_text.empty() ? cfg.cf_grid : parse_grid(grid_text);
  if (grid.empty()) throw gehm::ConfigError({"no C_F grid: pass --cf-grid or set regime.cf_grid"});
  const auto table = gehm::monte_carlo_regimes(cfg, grid, true);
  for (const auto& w : table.warnings) std::fprintf(stderr, "gehm: warning: %s\n", w.c_str());
  for (const auto& r : table.rows) {
    std::printf("C_F %s R %s %s blowup_fraction %s\n", gehm::format_double(r.C_F).c_str(),
                gehm::format_double(r.R).c_str(), gehm::to_string(r.regime).c_str(),
                gehm::format_double(r.blowup_fraction).c_str());
  }
  if (!table.spectrum.converged()) return non_convergence("spectral estimation");
  return kOk;
}

int cmd_sweep(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto cells = gehm::parameter_sweep(cfg, true);
  std::printf("%zu cells written to %s/sweep.csv\n", cells.size(), cfg.outputs.dir.c_str());
  return kOk;
}

int cmd_topologies(const CommonOptions& o, std::optional<std::size_t> seeds) {
  auto cfg = load(o);
  if (seeds) {
    if (*seeds == 0) throw gehm::ConfigError({"--seeds must be >= 1"});
    cfg.topologies.seeds = *seeds;
  }
  const auto table = gehm::topology_comparison(cfg, true);
  std::size_t failures = 0;
  for (const auto& r : table.rows) {
    std::printf("%s lambda_p %s gamma_raw %s gamma_normalized %s\n", r.model.c_str(),
                gehm::format_double(r.lambda_mean).c_str(), gehm::format_double(r.gamma_raw_mean).c_str(),
                gehm::format_double(r.gamma_normalized_mean).c_str());
    failures += r.lambda_nonconverged + r.gamma_nonconverged;
  }
  if (table.ordering_fraction) {
    std::printf("raw gamma ordering BA > WS > ER: %s\n", gehm::format_double(*table.ordering_fraction).c_str());
  }
  if (failures > 0) {
    std::fprintf(stderr, "gehm: %zu spectral run(s) did not converge (excluded from means)\n", failures);
    return kNonConvergence;
  }
  return kOk;
}

struct GraphGenOptions {
  std::string config;
  std::string model;
  std::optional<std::size_t> n, m, k;
  std::optional<double> prob, beta;
  std::optional<std::uint64_t> seed;
  std::string normalization;
  std::string output;
};

int cmd_graph_gen(const GraphGenOptions& o) {
  json tree = json::object();
  if (!o.config.empty()) tree = gehm::to_json(gehm::load_config(o.config));
  json& g = tree["graph"];
  if (!g.is_object()) g = json::object();
  if (!o.model.empty()) {
    g = json{{"model", o.model}, {"n", g.value("n", 2000)}, {"seed", g.value("seed", 123456)},
             {"normalization", g.value("normalization", "row")}};
  }
  if (o.n) g["n"] = *o.n;
  if (o.m) g["m"] = *o.m;
  if (o.k) g["k"] = *o.k;
  if (o.prob) g["prob"] = *o.prob;
  if (o.beta) g["beta"] = *o.beta;
  if (o.seed) g["seed"] = *o.seed;
  if (!o.normalization.empty()) g["normalization"] = o.normalization;
  const auto cfg = gehm::parse_config(tree);
  const auto graph = gehm::build_graph(cfg);
  if (o.output.empty() || o.output == "-") {
    gehm::write_graph(graph, std::cout);
  } else {
    gehm::write_graph(graph, o.output);
  }
  return kOk;
}

int cmd_graph_validate(const std::string& path) {
  const auto graph = gehm::read_graph(path);
  const auto deg = graph.degrees();
  std::size_t isolated = 0;
  for (auto d : deg) isolated += d == 0;
  json j = {{"nodes", graph.nodes()},
            {"undirected_edges", graph.undirected_edges()},
            {"value_symmetric", graph.is_value_symmetric()},
            {"isolated_nodes", isolated}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const gehm::ConfigError& e) {
    std::fprintf(stderr, "gehm: configuration error\n");
    for (const auto& issue : e.issues()) std::fprintf(stderr, "  %s\n", issue.c_str());
    return kConfigError;
  } catch (const gehm::ParseError& e) {
    std::fprintf(stderr, "gehm: %s\n", e.what());
    return kConfigError;
  } catch (const gehm::IoError& e) {
    std::fprintf(stderr, "gehm: %s\n", e.what());
    return kIoError;
  } catch (const gehm::InsufficientDataError& e) {
    std::fprintf(stderr, "gehm: %s\n", e.what());
    return kNonConvergence;
  } catch (const gehm::Error& e) {
    std::fprintf(stderr, "gehm: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gehm: internal error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph p-Laplacian diffusion with stochastic drift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gehm::library_version());

  CommonOptions common;
  std::string grid;
  std::optional<std::size_t> seeds;

  auto* simulate = app.add_subcommand("simulate", "run an ensemble and write trajectories and summaries");
  add_common(simulate, common, true);
  auto* spectrum = app.add_subcommand("spectrum", "estimate lambda_p and Gamma");
  add_common(spectrum, common, false);
  auto* regimes = app.add_subcommand("regimes", "Monte Carlo regime table over a C_F grid");
  add_common(regimes, common, true);
  regimes->add_option("--cf-grid", grid, "comma separated C_F values");
  auto* sweep = app.add_subcommand("sweep", "two-parameter sweep declared in the config");
  add_common(sweep, common, true);
  auto* topologies = app.add_subcommand("topologies", "spectral comparison across graph models");
  add_common(topologies, common, false);
  topologies->add_option("--seeds", seeds, "graphs per model");

  auto* graph = app.add_subcommand("graph", "generate or validate graph files");
  graph->require_subcommand(1);
  GraphGenOptions gen;
  auto* graph_gen = graph->add_subcommand("gen", "generate a graph (config graph block, flags override)");
  graph_gen->add_option("config", gen.config, "experiment config file");
  graph_gen->add_option("--model", gen.model, "barabasi_albert | erdos_renyi | watts_strogatz");
  graph_gen->add_option("--n", gen.n);
  graph_gen->add_option("--m", gen.m);
  graph_gen->add_option("--k", gen.k);
  graph_gen->add_option("--prob", gen.prob);
  graph_gen->add_option("--beta", gen.beta);
  graph_gen->add_option("--seed", gen.seed);
  graph_gen->add_option("--normalization", gen.normalization, "none | row | symmetric");
  graph_gen->add_option("-o,--output", gen.output, "output file (default stdout)");
  std::string validate_path;
  auto* graph_validate = graph->add_subcommand("validate", "check a graph file");
  graph_validate->add_option("file", validate_path)->required();

  auto* config = app.add_subcommand("config", "print the fully resolved config");
  std::string config_path;
  config->add_option("config", config_path, "config file (defaults when omitted)");

  app.add_flag_callback("--kernels", [] {
    std::printf("%s\n", gehm::simd::active_kernels().name);
    std::exit(0);
  }, "print the active kernel set");

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return guarded([&] { return cmd_simulate(common); });
  if (*spectrum) return guarded([&] { return cmd_spectrum(common); });
  if (*regimes) return guarded([&] { return cmd_regimes(common, grid); });
  if (*sweep) return guarded([&] { return cmd_sweep(common); });
  if (*topologies) return guarded([&] { return cmd_topologies(common, seeds); });
  if (*graph_gen) return guarded([&] { return cmd_graph_gen(gen); });
  if (*graph_validate) return guarded([&] { return cmd_graph_validate(validate_path); });
  if (*config) {
    return guarded([&] {
      const auto cfg = config_path.empty() ? gehm::ExperimentConfig{} : gehm::load_config(config_path);
      std::cout << gehm::to_json(cfg).dump(2) << "\n";
      return kOk;
    });
  }
  return kOk;
}
