#pragma once

#include <string>

#include "adiabat/config.hpp"

namespace adiabat {

/// CLI exit codes: 0 success, 1 configuration error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// Runs the calibrated pipeline and writes entropy_grid.csv, adiabats.json
/// and report.json into `out_dir`.
int cmd_reconstruct(const std::string& config_path, const std::string& out_dir);

/// Runs the two-adiabat pipeline and writes, in addition, recalibration.csv
/// and temperature_grid.csv.
int cmd_recalibrate(const std::string& config_path, const std::string& out_dir);

/// Prints an invariant audit table (sign scan, Jacobian deviation, round-trip
/// error) and returns 0 iff all checks pass their configured tolerances.
int cmd_check(const std::string& config_path);

/// Renders <out_dir>/adiabats.json to <out_dir>/adiabats.svg.
int cmd_plot(const std::string& out_dir);

struct CliOverrides {
  std::optional<double> tol;           // sets both root_tol and quad_tol
  std::optional<std::pair<int, int>> grid;
  std::optional<std::vector<double>> levels;
};

void apply_overrides(ModelConfig& cfg, const CliOverrides& ov);

int cmd_reconstruct(const ModelConfig& cfg, const std::string& out_dir);
int cmd_recalibrate(const ModelConfig& cfg, const std::string& out_dir);
int cmd_check(const ModelConfig& cfg);

}  // namespace adiabat
