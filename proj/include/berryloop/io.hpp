#pragma once

// Run configuration (JSON) and deterministic result files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "berryloop/berry.hpp"
#include "berryloop/model.hpp"

namespace berryloop {

inline constexpr const char* kFormatTag = "berryloop-v1";

struct ProtocolConfig {
  double period = 20.0;
  double l2_cut = 1e-4;
  double dtheta_max = 0.01;
  double dt_max = 0.0;  // 0 means period / 200
  double fixed_dt = 0.0;
  double lambda_reg = kDefaultRegularization;

  bool operator==(const ProtocolConfig&) const = default;
};

struct GroundPrepConfig {
  double dtau = 0.02;
  double l2_cut_it = 1e-2;
  int max_steps = 5000;
  double energy_tol = 1e-8;

  bool operator==(const GroundPrepConfig&) const = default;
};

/// Sweepable parameters: delta, T, dt_max, fixed_dt, l2_cut.
struct SweepAxis {
  std::string parameter;
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

struct OutputConfig {
  std::string directory;  // empty means no files
  bool csv = true;
  bool json = true;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ModelParams model;
  ProtocolConfig protocol;
  GroundPrepConfig ground_prep;
  std::optional<SweepAxis> sweep;
  OutputConfig output;
  bool infidelities = false;

  /// Throws ConfigError.
  void validate() const;
  ItConfig it_config() const;
  DynConfig dyn_config() const;
  /// Copy with the sweep axis set to `value` and the sweep removed.
  RunConfig at_sweep_value(double value) const;

  bool operator==(const RunConfig& o) const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const BerryResult& r);

std::string format_double(double v);
std::string trajectory_csv(const TrajectoryRecord& traj);

struct SummaryRow {
  double axis_value = 0.0;
  double phi_b_principal = 0.0;
  double max_infid_f = 0.0;
  int max_cnot = 0;
  int max_depth = 0;
};

std::string summary_csv(const std::vector<SummaryRow>& rows);
SummaryRow summary_row(double axis_value, const BerryResult& r);

/// trajectory.csv and/or result.json in `dir`, created if needed.
void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const BerryResult& r);
void write_summary(const std::filesystem::path& dir, const std::vector<SummaryRow>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace berryloop
