#include "gehm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "gehm/error.hpp"

namespace gehm {

using nlohmann::json;

std::string to_string(LambdaChoice c) {
  return c == LambdaChoice::dominant ? "dominant" : "spectral_gap";
}

ExperimentConfig::ExperimentConfig() { sim.snapshot_stride = 100; }

namespace {

// Walks one JSON object, reading typed fields with defaults and recording
// every problem instead of stopping at the first.
class Reader {
public:
  Reader(const json* obj, std::string path, std::vector<std::string>& issues)
      : obj_(obj), path_(std::move(path)), issues_(issues) {
    if (obj_ && !obj_->is_object()) {
      issues_.push_back(where("") + " must be an object");
      obj_ = nullptr;
    }
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  ~Reader() {
    if (!obj_) return;
    for (const auto& [key, _] : obj_->items()) {
      if (!seen_.count(key)) issues_.push_back("unknown key " + where(key));
    }
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    const json* sub = (obj_ && obj_->contains(key) && !(*obj_)[key].is_null()) ? &(*obj_)[key] : nullptr;
    return Reader(sub, where(key), issues_);
  }

  bool has(const std::string& key) const {
    return obj_ && obj_->contains(key) && !(*obj_)[key].is_null();
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &(*obj_)[key] : nullptr;
  }

  double number(const std::string& key, double def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number()) {
      issues_.push_back(where(key) + " must be a number");
      return def;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) issues_.push_back(where(key) + " must be finite");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      issues_.push_back(where(key) + " must be a non-negative integer");
      return def;
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_boolean()) {
      issues_.push_back(where(key) + " must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_string()) {
      issues_.push_back(where(key) + " must be a string");
      return def;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    std::vector<double> out;
    if (!v) return out;
    if (!v->is_array()) {
      issues_.push_back(where(key) + " must be a list of numbers");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        issues_.push_back(where(key) + " must contain only finite numbers");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  template <class F>
  auto guarded(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigError& e) {
      for (const auto& s : e.issues()) issues_.push_back(path_ + ": " + s);
    } catch (const Error& e) {
      issues_.push_back(path_ + ": " + e.what());
    }
    return decltype(f()){};
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  std::vector<std::string>& issues() { return issues_; }

private:
  const json* obj_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
};

GraphModelSpec read_graph_spec(Reader& r, const GraphModelSpec& def) {
  GraphModelSpec spec;
  spec.n = r.count("n", def.n);
  spec.seed = r.count("seed", def.seed);
  const std::string model = r.text("model", model_name(def.model));
  if (model == "barabasi_albert") {
    const auto* d = std::get_if<BarabasiAlbert>(&def.model);
    spec.model = BarabasiAlbert{r.count("m", d ? d->m : 3)};
  } else if (model == "erdos_renyi") {
    const auto* d = std::get_if<ErdosRenyi>(&def.model);
    spec.model = ErdosRenyi{r.number("prob", d ? d->prob : 0.003)};
  } else if (model == "watts_strogatz") {
    const auto* d = std::get_if<WattsStrogatz>(&def.model);
    spec.model = WattsStrogatz{r.count("k", d ? d->k : 6), r.number("beta", d ? d->beta : 0.1)};
  } else {
    r.issues().push_back(r.where("model") +
                         " must be barabasi_albert, erdos_renyi or watts_strogatz");
  }
  for (auto& s : validate(spec)) r.issues().push_back(r.where("") + ": " + s);
  return spec;
}

ScalarMap read_map(Reader r, const ScalarMap& def) {
  const std::string name = r.text("map", def.name());
  const double param = r.number("param", def.param);
  return r.guarded([&] { return resolve_scalar_map(name, param); });
}

void read_sim(Reader& r, SimulationConfig& sim) {
  sim.p = r.number("p", sim.p);
  sim.eps = r.number("eps", sim.eps);
  sim.dt = r.number("dt", sim.dt);
  sim.horizon = r.number("horizon", sim.horizon);
  sim.seed = r.count("seed", sim.seed);
  {
    Reader rr = r.child("reaction");
    const std::string form = rr.text("form", "linear");
    if (form == "linear") {
      sim.reaction = LinearReaction{rr.number("C_F", 0.0), rr.number("eta", 0.0)};
    } else if (form == "modulated") {
      ModulatedReaction mod;
      mod.phi = read_map(rr.child("phi"), ScalarMap{ScalarMapKind::constant, 0.0});
      mod.psi = read_map(rr.child("psi"), ScalarMap{ScalarMapKind::constant, 0.0});
      sim.reaction = mod;
    } else {
      r.issues().push_back(rr.where("form") + " must be linear or modulated");
    }
  }
  {
    Reader rn = r.child("noise");
    const std::string form = rn.text("form", "additive");
    if (form == "additive") {
      sim.noise = AdditiveNoise{rn.number("sigma", 0.02)};
    } else if (form == "multiplicative") {
      MultiplicativeNoise m;
      m.sigma0 = rn.number("sigma0", m.sigma0);
      m.eta_deg = rn.number("eta_deg", m.eta_deg);
      m.alpha = rn.number("alpha", m.alpha);
      m.beta = rn.number("beta", m.beta);
      sim.noise = m;
    } else {
      r.issues().push_back(rn.where("form") + " must be additive or multiplicative");
    }
  }
  const std::string coupling = r.text("noise_coupling", to_string(sim.noise_coupling));
  sim.noise_coupling = r.guarded([&] { return parse_noise_coupling(coupling); });
  {
    Reader ro = r.child("ou");
    sim.ou.kappa = ro.number("kappa", sim.ou.kappa);
    sim.ou.mu = ro.number("mu", sim.ou.mu);
    sim.ou.xi = ro.number("xi", sim.ou.xi);
    sim.ou.x0 = ro.number("x0", sim.ou.x0);
  }
  {
    Reader ri = r.child("init");
    const std::string kind = ri.text("kind", "gaussian_unit_l2");
    if (kind == "gaussian_unit_l2") {
      sim.init = InitSpec{};
    } else if (kind == "constant") {
      sim.init = InitSpec{InitKind::constant, ri.number("value", 0.0), {}};
    } else if (kind == "custom") {
      sim.init = InitSpec{InitKind::custom, 0.0, ri.numbers("values")};
    } else {
      r.issues().push_back(ri.where("kind") + " must be gaussian_unit_l2, constant or custom");
    }
  }
  sim.blowup_threshold = r.optional_number("blowup_threshold");
  sim.blowup_factor = r.number("blowup_factor", sim.blowup_factor);
  sim.snapshot_stride = r.count("snapshot_stride", sim.snapshot_stride);
  sim.record_stride = r.count("record_stride", sim.record_stride);
  sim.allow_unstable_dt = r.boolean("allow_unstable_dt", sim.allow_unstable_dt);
}

std::optional<SweepAxis> read_axis(Reader r, bool present) {
  if (!present) return std::nullopt;
  SweepAxis axis;
  axis.path = r.text("path", "");
  axis.values = r.numbers("values");
  if (axis.path.empty()) r.issues().push_back(r.where("path") + " is required");
  if (axis.values.empty()) r.issues().push_back(r.where("values") + " must be a nonempty list");
  return axis;
}

json map_json(const ScalarMap& m) { return {{"map", m.name()}, {"param", m.param}}; }

std::string dotted_to_pointer(const std::string& path) {
  std::string ptr = "/";
  for (char c : path) ptr += c == '.' ? '/' : c;
  return ptr;
}

bool touches_seed(const std::string& path) {
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = path.find('.', start);
    const std::string seg = path.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (seg == "seed") return true;
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return false;
}

void check_axis_path(const json& resolved, const SweepAxis& axis, const std::string& where,
                     std::vector<std::string>& issues) {
  if (axis.path.empty()) return;
  if (touches_seed(axis.path)) {
    issues.push_back(where + ": sweeping '" + axis.path + "' is not allowed; seeds vary only by replicate");
    return;
  }
  try {
    const json& target = resolved.at(json::json_pointer(dotted_to_pointer(axis.path)));
    if (!target.is_number()) issues.push_back(where + ": '" + axis.path + "' is not a numeric field");
  } catch (const json::exception&) {
    issues.push_back(where + ": path '" + axis.path + "' does not resolve in the config");
  }
}

}  // namespace

json to_json(const GraphModelSpec& spec) {
  json j = {{"model", model_name(spec.model)}, {"n", spec.n}, {"seed", spec.seed}};
  if (const auto* ba = std::get_if<BarabasiAlbert>(&spec.model)) {
    j["m"] = ba->m;
  } else if (const auto* er = std::get_if<ErdosRenyi>(&spec.model)) {
    j["prob"] = er->prob;
  } else {
    const auto& ws = std::get<WattsStrogatz>(spec.model);
    j["k"] = ws.k;
    j["beta"] = ws.beta;
  }
  return j;
}

ExperimentConfig parse_config(const json& root) {
  std::vector<std::string> issues;
  ExperimentConfig cfg;
  {
    Reader r(&root, "", issues);
    const auto version = r.count("config_version", kConfigVersion);
    if (version != static_cast<std::uint64_t>(kConfigVersion)) {
      issues.push_back("config_version must be " + std::to_string(kConfigVersion));
    }
    {
      Reader rg = r.child("graph");
      cfg.graph = read_graph_spec(rg, cfg.graph);
      const std::string norm = rg.text("normalization", to_string(cfg.normalization));
      cfg.normalization = rg.guarded([&] { return parse_normalization(norm); });
    }
    {
      Reader rs = r.child("sim");
      read_sim(rs, cfg.sim);
    }
    {
      Reader rs = r.child("spectral");
      cfg.spectral.p = rs.optional_number("p");
      cfg.spectral.tol = rs.number("tol", cfg.spectral.tol);
      cfg.spectral.max_iter = rs.count("max_iter", cfg.spectral.max_iter);
      const std::string basis = rs.text("gamma_basis", to_string(cfg.spectral.gamma_basis));
      cfg.spectral.gamma_basis = rs.guarded([&] { return parse_gamma_basis(basis); });
      const std::string choice = rs.text("lambda_choice", to_string(cfg.spectral.lambda_choice));
      if (choice == "dominant") {
        cfg.spectral.lambda_choice = LambdaChoice::dominant;
      } else if (choice == "spectral_gap") {
        cfg.spectral.lambda_choice = LambdaChoice::spectral_gap;
      } else {
        issues.push_back(rs.where("lambda_choice") + " must be dominant or spectral_gap");
      }
      if (cfg.spectral.p && !(*cfg.spectral.p > 1.0)) issues.push_back("spectral.p must be > 1");
      if (!(cfg.spectral.tol > 0.0)) issues.push_back("spectral.tol must be > 0");
      if (cfg.spectral.max_iter == 0) issues.push_back("spectral.max_iter must be >= 1");
    }
    {
      Reader rr = r.child("regime");
      cfg.delta_band = rr.number("delta_band", cfg.delta_band);
      cfg.cf_grid = rr.numbers("cf_grid");
      if (!(cfg.delta_band > 0.0)) issues.push_back("regime.delta_band must be > 0");
    }
    {
      Reader re = r.child("events");
      cfg.events.threshold = re.number("threshold", cfg.events.threshold);
      const std::string dir = re.text("direction", to_string(cfg.events.direction));
      cfg.events.direction = re.guarded([&] { return parse_direction(dir); });
      const std::string est = re.text("estimator", to_string(cfg.events.estimator));
      cfg.events.estimator = re.guarded([&] { return parse_estimator(est); });
    }
    cfg.replicates = r.count("replicates", cfg.replicates);
    cfg.workers = r.count("workers", cfg.workers);
    if (cfg.replicates < 1) issues.push_back("replicates must be >= 1");
    if (cfg.workers < 1) issues.push_back("workers must be >= 1");
    {
      Reader ro = r.child("outputs");
      cfg.outputs.dir = ro.text("dir", cfg.outputs.dir);
      cfg.outputs.trajectories = ro.boolean("trajectories", cfg.outputs.trajectories);
      cfg.outputs.snapshots = ro.boolean("snapshots", cfg.outputs.snapshots);
    }
    {
      const bool present = r.has("sweep");
      Reader rw = r.child("sweep");
      if (present) {
        SweepSpec sweep;
        const bool has_x = rw.has("x");
        const bool has_y = rw.has("y");
        auto x = read_axis(rw.child("x"), has_x);
        auto y = read_axis(rw.child("y"), has_y);
        if (!x) issues.push_back("sweep.x is required when sweep is present");
        sweep.x = x.value_or(SweepAxis{});
        sweep.y = y;
        cfg.sweep = sweep;
      }
    }
    {
      Reader rt = r.child("topologies");
      cfg.topologies.seeds = rt.count("seeds", cfg.topologies.seeds);
      if (cfg.topologies.seeds < 1) issues.push_back("topologies.seeds must be >= 1");
      if (const json* models = rt.raw("models")) {
        if (!models->is_array()) {
          issues.push_back("topologies.models must be a list");
        } else {
          for (std::size_t k = 0; k < models->size(); ++k) {
            Reader rm(&(*models)[k], "topologies.models[" + std::to_string(k) + "]", issues);
            cfg.topologies.models.push_back(read_graph_spec(rm, GraphModelSpec{}));
          }
        }
      }
    }
  }

  for (auto& s : validate(cfg.sim, cfg.graph.n)) issues.push_back(s);

  if (issues.empty() && cfg.sweep) {
    const json resolved = to_json(cfg);
    check_axis_path(resolved, cfg.sweep->x, "sweep.x", issues);
    if (cfg.sweep->y) check_axis_path(resolved, *cfg.sweep->y, "sweep.y", issues);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({"'" + path.string() + "' is not valid JSON: " + e.what()});
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json graph = to_json(cfg.graph);
  graph["normalization"] = to_string(cfg.normalization);

  const auto& s = cfg.sim;
  json reaction;
  if (const auto* lin = std::get_if<LinearReaction>(&s.reaction)) {
    reaction = {{"form", "linear"}, {"C_F", lin->C_F}, {"eta", lin->eta}};
  } else {
    const auto& mod = std::get<ModulatedReaction>(s.reaction);
    reaction = {{"form", "modulated"}, {"phi", map_json(mod.phi)}, {"psi", map_json(mod.psi)}};
  }
  json noise;
  if (const auto* add = std::get_if<AdditiveNoise>(&s.noise)) {
    noise = {{"form", "additive"}, {"sigma", add->sigma}};
  } else {
    const auto& m = std::get<MultiplicativeNoise>(s.noise);
    noise = {{"form", "multiplicative"}, {"sigma0", m.sigma0}, {"eta_deg", m.eta_deg},
             {"alpha", m.alpha}, {"beta", m.beta}};
  }
  json init;
  switch (s.init.kind) {
    case InitKind::gaussian_unit_l2: init = {{"kind", "gaussian_unit_l2"}}; break;
    case InitKind::constant: init = {{"kind", "constant"}, {"value", s.init.value}}; break;
    case InitKind::custom: init = {{"kind", "custom"}, {"values", s.init.values}}; break;
  }
  json sim = {
      {"p", s.p},
      {"eps", s.eps},
      {"dt", s.dt},
      {"horizon", s.horizon},
      {"seed", s.seed},
      {"reaction", reaction},
      {"noise", noise},
      {"noise_coupling", to_string(s.noise_coupling)},
      {"ou", {{"kappa", s.ou.kappa}, {"mu", s.ou.mu}, {"xi", s.ou.xi}, {"x0", s.ou.x0}}},
      {"init", init},
      {"blowup_threshold", s.blowup_threshold ? json(*s.blowup_threshold) : json(nullptr)},
      {"blowup_factor", s.blowup_factor},
      {"snapshot_stride", s.snapshot_stride},
      {"record_stride", s.record_stride},
      {"allow_unstable_dt", s.allow_unstable_dt},
  };
  json spectral = {
      {"p", cfg.spectral.p ? json(*cfg.spectral.p) : json(nullptr)},
      {"tol", cfg.spectral.tol},
      {"max_iter", cfg.spectral.max_iter},
      {"gamma_basis", to_string(cfg.spectral.gamma_basis)},
      {"lambda_choice", to_string(cfg.spectral.lambda_choice)},
  };
  json sweep = nullptr;
  if (cfg.sweep) {
    sweep = {{"x", {{"path", cfg.sweep->x.path}, {"values", cfg.sweep->x.values}}}};
    if (cfg.sweep->y) sweep["y"] = {{"path", cfg.sweep->y->path}, {"values", cfg.sweep->y->values}};
  }
  json models = json::array();
  for (const auto& m : cfg.topologies.models) models.push_back(to_json(m));

  return {
      {"config_version", kConfigVersion},
      {"graph", graph},
      {"sim", sim},
      {"spectral", spectral},
      {"regime", {{"delta_band", cfg.delta_band}, {"cf_grid", cfg.cf_grid}}},
      {"events",
       {{"threshold", cfg.events.threshold},
        {"direction", to_string(cfg.events.direction)},
        {"estimator", to_string(cfg.events.estimator)}}},
      {"replicates", cfg.replicates},
      {"workers", cfg.workers},
      {"outputs",
       {{"dir", cfg.outputs.dir},
        {"trajectories", cfg.outputs.trajectories},
        {"snapshots", cfg.outputs.snapshots}}},
      {"sweep", sweep},
      {"topologies", {{"seeds", cfg.topologies.seeds}, {"models", models}}},
  };
}

ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& path, double value) {
  if (touches_seed(path)) {
    throw ConfigError({"sweeping '" + path + "' is not allowed; seeds vary only by replicate"});
  }
  json j = to_json(cfg);
  const json::json_pointer ptr(dotted_to_pointer(path));
  if (!j.contains(ptr) || !j.at(ptr).is_number()) {
    throw ConfigError({"path '" + path + "' does not resolve to a numeric config field"});
  }
  if (j.at(ptr).is_number_integer()) {
    if (value < 0.0 || value != std::floor(value)) {
      throw ConfigError({"'" + path + "' takes a non-negative integer, got " + std::to_string(value)});
    }
    j[ptr] = static_cast<std::uint64_t>(value);
  } else {
    j[ptr] = value;
  }
  return parse_config(j);
}

std::vector<GraphModelSpec> default_topologies(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.graph.n;
  std::size_t m = 3;
  if (const auto* ba = std::get_if<BarabasiAlbert>(&cfg.graph.model)) m = ba->m;
  // BA edge count: m(m-1)/2 core edges plus m per added node.
  const double edges = static_cast<double>(m * (m - 1) / 2 + (n - m) * m);
  const double mean_degree = 2.0 * edges / static_cast<double>(n);
  std::vector<GraphModelSpec> out;
  out.push_back({BarabasiAlbert{m}, n, cfg.graph.seed});
  out.push_back({ErdosRenyi{std::min(1.0, mean_degree / static_cast<double>(n - 1))}, n, cfg.graph.seed});
  out.push_back({WattsStrogatz{2 * m, 0.1}, n, cfg.graph.seed});
  return out;
}

}  // namespace gehm
