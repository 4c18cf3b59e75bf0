#include "gehm/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gehm/error.hpp"

namespace gehm {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto probe = dir / ".gehm-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string convention_header(std::string_view extra) {
  std::string h =
      "# time: model time units\n"
      "# energy_p: (1/p) * sum over unordered edges of (w_ij+w_ji)/2 * |u_i-u_j|^p\n"
      "# gradient norms: sums over directed edges weighted by w_ij\n";
  if (!extra.empty()) {
    h += "# ";
    h += extra;
    h += "\n";
  }
  return h;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::string s = convention_header("p = " + format_double(traj.p));
  s += "t,l2_norm_sq,energy_p,x\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    s += format_double(traj.times[k]) + "," + format_double(traj.l2_norm_sq[k]) + "," +
         format_double(traj.energy_p[k]) + "," + format_double(traj.x_path[k]) + "\n";
  }
  write_text(path, s);
}

void write_snapshots(const std::filesystem::path& dir, const Trajectory& traj) {
  char name[48];
  for (const auto& snap : traj.snapshots) {
    std::snprintf(name, sizeof name, "step_%09zu.csv", snap.step);
    std::string s = "# t = " + format_double(snap.t) + "\nnode,value\n";
    for (std::size_t i = 0; i < snap.u.size(); ++i) s += std::to_string(i) + "," + format_double(snap.u[i]) + "\n";
    write_text(dir / name, s);
  }
}

void write_survival_csv(const std::filesystem::path& path, const SurvivalCurve& c) {
  std::string s = "# estimator: " + to_string(c.estimator) +
                  "\n# H: Nelson-Aalen cumulative hazard; baseline_hazard: d_k/(n_k*gap_k)\n";
  s += "t,S,H,at_risk,events,baseline_hazard\n";
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    s += format_double(c.times[k]) + "," + format_double(c.survival[k]) + "," +
         format_double(c.cumulative_hazard[k]) + "," + std::to_string(c.at_risk[k]) + "," +
         std::to_string(c.events[k]) + "," + format_double(c.baseline_hazard[k]) + "\n";
  }
  write_text(path, s);
}

json trajectory_sidecar(const Trajectory& traj, const BlowupDetection* detection) {
  json j = {
      {"status", to_string(traj.status)},
      {"t_star", traj.t_star ? json(*traj.t_star) : json(nullptr)},
      {"t_failed", traj.t_failed ? json(*traj.t_failed) : json(nullptr)},
      {"steps", traj.steps},
      {"samples", traj.times.size()},
      {"blowup_threshold", number_or_null(traj.blowup_threshold)},
      {"cfl_number", number_or_null(traj.cfl_number)},
      {"warnings", traj.warnings},
      {"final_x", number_or_null(traj.final_state.x)},
  };
  if (detection) j["fitted_growth_rate"] = number_or_null(detection->growth_rate);
  return j;
}

json to_json(const RegimeReport& r) {
  json j = {
      {"R", number_or_null(r.R)},
      {"regime", to_string(r.regime)},
      {"delta_band", r.delta_band},
      {"lambda_p", number_or_null(r.lambda_p)},
      {"gamma", number_or_null(r.gamma)},
      {"gamma_basis", to_string(r.gamma_basis)},
      {"C_F", number_or_null(r.C_F)},
      {"C_F_source", r.C_F_source},
  };
  if (r.evidence) {
    j["evidence"] = {{"fitted_rate", number_or_null(r.evidence->fitted_rate)},
                     {"t_star", r.evidence->t_star ? json(*r.evidence->t_star) : json(nullptr)}};
  } else {
    j["evidence"] = nullptr;
  }
  return j;
}

json to_json(const SurvivalCurve& c) {
  json hazard = json::array();
  for (double h : c.baseline_hazard) hazard.push_back(number_or_null(h));
  return {{"estimator", to_string(c.estimator)}, {"times", c.times},
          {"survival", c.survival},              {"cumulative_hazard", c.cumulative_hazard},
          {"at_risk", c.at_risk},                {"events", c.events},
          {"baseline_hazard", hazard}};
}

json to_json(const SpectralEstimate& e, bool with_vector) {
  json j = {{"lambda_p", number_or_null(e.lambda_p)}, {"gamma", number_or_null(e.gamma)},
            {"gamma_basis", to_string(e.gamma_basis)}, {"iterations", e.iterations},
            {"residual", number_or_null(e.residual)}, {"converged", e.converged},
            {"restarts", e.restarts}};
  if (with_vector) j["eigenvector"] = e.eigenvector;
  return j;
}

json to_json(const RadiusEstimate& e) {
  return {{"rho", number_or_null(e.rho)}, {"iterations", e.iterations}, {"converged", e.converged}};
}

}  // namespace gehm
