#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gehm/diagnostics.hpp"
#include "gehm/dynamics.hpp"
#include "gehm/spectral.hpp"

namespace gehm {

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

/// Creates the directory and checks that a file can be written into it.
/// IoError otherwise.
void prepare_output_dir(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Comment header stating the edge-sum conventions, prepended to CSV files.
std::string convention_header(std::string_view extra = {});

/// t, l2_norm_sq, energy_p, x
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// One CSV (node, value) per snapshot under dir/step_<k>.csv.
void write_snapshots(const std::filesystem::path& dir, const Trajectory& traj);

/// t, S, H, at_risk, events, baseline_hazard
void write_survival_csv(const std::filesystem::path& path, const SurvivalCurve& curve);

nlohmann::json trajectory_sidecar(const Trajectory& traj, const BlowupDetection* detection);
nlohmann::json to_json(const RegimeReport& report);
nlohmann::json to_json(const SurvivalCurve& curve);
nlohmann::json to_json(const SpectralEstimate& est, bool with_vector = false);
nlohmann::json to_json(const RadiusEstimate& est);

/// Non-finite numbers map to null.
nlohmann::json number_or_null(double v);

}  // namespace gehm
