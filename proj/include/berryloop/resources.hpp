#pragma once

// CNOT and layer-depth traces along runs and their maxima across sweeps.

#include <vector>

#include "berryloop/avqds.hpp"

namespace berryloop {

struct ResourcePoint {
  double rho = 0.0;
  int cnot = 0;
  int depth = 0;
  std::size_t n_theta = 0;
};

struct ResourceTrace {
  std::vector<ResourcePoint> points;
  double period = 0.0;
  double delta = 0.0;
  double u = 0.0;
  double l2_cut = 0.0;

  int max_cnot() const;
  int max_depth() const;
};

/// Throws ContractError when cnot, depth or unit count ever decrease.
ResourceTrace trace_from_trajectory(const TrajectoryRecord& traj);

struct SweepRow {
  double delta = 0.0;
  int max_cnot = 0;
  int max_depth = 0;
};

struct SweepSummary {
  std::vector<SweepRow> rows;  // ascending delta, one row per distinct delta
  int max_cnot = 0;
  int max_depth = 0;
  /// Mean of per-delta CNOT maxima for delta < 0 over the same for delta > 0; NaN if either side is empty.
  double nontrivial_to_trivial_cnot = 0.0;
};

SweepSummary sweep_summary(const std::vector<ResourceTrace>& traces);

}  // namespace berryloop
