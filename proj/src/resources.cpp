#include "berryloop/resources.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "berryloop/errors.hpp"

namespace berryloop {

int ResourceTrace::max_cnot() const {
  int m = 0;
  for (const auto& p : points) m = std::max(m, p.cnot);
  return m;
}

int ResourceTrace::max_depth() const {
  int m = 0;
  for (const auto& p : points) m = std::max(m, p.depth);
  return m;
}

ResourceTrace trace_from_trajectory(const TrajectoryRecord& traj) {
  ResourceTrace out;
  out.points.reserve(traj.points.size());
  for (const auto& p : traj.points) {
    if (!out.points.empty()) {
      const auto& prev = out.points.back();
      if (p.cnot < prev.cnot || p.depth < prev.depth || p.n_theta < prev.n_theta) {
        throw ContractError("trace_from_trajectory: resources decreased at step " + std::to_string(p.step));
      }
    }
    out.points.push_back({p.rho, p.cnot, p.depth, p.n_theta});
  }
  return out;
}

SweepSummary sweep_summary(const std::vector<ResourceTrace>& traces) {
  std::map<double, SweepRow> by_delta;
  for (const auto& tr : traces) {
    auto& row = by_delta[tr.delta];
    row.delta = tr.delta;
    row.max_cnot = std::max(row.max_cnot, tr.max_cnot());
    row.max_depth = std::max(row.max_depth, tr.max_depth());
  }
  SweepSummary s;
  double neg = 0.0, pos = 0.0;
  int n_neg = 0, n_pos = 0;
  for (const auto& [delta, row] : by_delta) {
    s.rows.push_back(row);
    s.max_cnot = std::max(s.max_cnot, row.max_cnot);
    s.max_depth = std::max(s.max_depth, row.max_depth);
    if (delta < 0.0) {
      neg += row.max_cnot;
      ++n_neg;
    } else if (delta > 0.0) {
      pos += row.max_cnot;
      ++n_pos;
    }
  }
  s.nontrivial_to_trivial_cnot = (n_neg > 0 && n_pos > 0 && pos > 0.0)
                                     ? (neg / n_neg) / (pos / n_pos)
                                     : std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace berryloop
