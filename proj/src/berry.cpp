#include "berryloop/berry.hpp"

#include <cmath>
#include <numbers>

#include "berryloop/errors.hpp"

namespace berryloop {

LoopSchedule make_loop_schedule(double period, const DynConfig& cfg) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("make_loop_schedule: period must be positive");
  LoopSchedule s;
  s.period = period;
  s.dt_max = cfg.dt_max > 0.0 ? cfg.dt_max : period / 200.0;
  s.fixed_dt = cfg.fixed_dt;
  return s;
}

OverlapReadout hadamard_overlap(const StateVector& initial, const StateVector& final_state) {
  if (initial.dim() != final_state.dim()) throw DimensionError("hadamard_overlap: dimension mismatch");
  const cplx z = inner(initial, final_state);
  OverlapReadout r;
  r.p0 = 0.5 * (1.0 + z.real());
  r.magnitude = std::abs(z);
  r.phi_qc = r.magnitude > 0.0 ? principal_value(std::arg(z)) : 0.0;
  return r;
}

double principal_value(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = phi - two_pi * std::round(phi / two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

ItConfig with_default_pool(ItConfig cfg, const ModelParams& params) {
  if (cfg.pool.elements.empty()) cfg.pool = qubit_excitation_pool(params.n_qubits());
  return cfg;
}

DynConfig with_default_pool(DynConfig cfg, const ModelParams& params) {
  if (cfg.pool.elements.empty()) cfg.pool = hamiltonian_pool(params);
  return cfg;
}

BerryResult run_berry(const ModelParams& params, double period, const ItConfig& cfg_it, const DynConfig& cfg_dyn,
                      const BerryOptions& options) {
  params.validate();
  const ItConfig it = with_default_pool(cfg_it, params);
  DynConfig dyn = with_default_pool(cfg_dyn, params);
  dyn.record_snapshots = dyn.record_snapshots || options.compute_infidelities;
  const LoopSchedule schedule = make_loop_schedule(period, dyn);
  const TwistFamily family = sshh_family(params);

  BerryResult res;
  res.period = period;
  StateVector reference = reference_state(params);
  reference *= options.reference_phase;
  const PauliSum h0 = family.at(0.0);
  auto [ansatz, ground] = avqite_run(h0, reference, it);
  const StateVector initial = evaluate(ansatz);
  ground.infidelity = infidelity(initial, ground_state(h0).ground_state);
  res.ground = ground;
  res.initial_resources = resource_metrics(ansatz);
  if (!ground.converged) res.warnings.emplace_back("ground_prep_unconverged");
  if (ground.saturated) res.warnings.emplace_back("ground_prep_saturated");

  EvolveResult ev = evolve(ansatz, schedule, family, dyn);
  res.final_resources = resource_metrics(ansatz);
  if (ev.record.saturated) res.warnings.emplace_back("growth_saturated");

  res.readout = hadamard_overlap(initial, evaluate(ansatz));
  if (res.readout.magnitude < kAdiabaticOverlapFloor) res.warnings.emplace_back("nonadiabatic_overlap");
  res.phi_g1 = ev.phase.phi_g1;
  res.phi_g2 = ev.phase.phi_g2;
  res.phi_g = ev.phase.phi_g();
  res.phi_b = res.readout.phi_qc + res.phi_g;
  res.phi_b_principal = principal_value(res.phi_b);
  res.trajectory = std::move(ev.record);

  if (options.compute_infidelities) {
    res.infidelity = infidelities(res.trajectory, family, schedule, options.ed);
  }
  if (!cfg_dyn.record_snapshots) res.trajectory.snapshots.clear();
  return res;
}

SymmetryReport symmetry_report(const TrajectoryRecord& traj, double period) {
  SymmetryReport r;
  if (traj.points.empty()) return r;
  const double boundary = 0.5 * period;
  const double eps = 1e-12 * period;
  const TrajectoryPoint* mid = nullptr;
  for (const auto& p : traj.points) {
    if (std::abs(p.clock - boundary) <= eps) {
      mid = &p;
      break;
    }
  }
  if (mid == nullptr) throw ContractError("symmetry_report: trajectory has no point at the half-cycle boundary");
  const TrajectoryPoint& last = traj.points.back();
  r.phi_g1_forward = mid->phi_g1;
  r.phi_g2_forward = mid->phi_g2;
  r.phi_g1_backward = last.phi_g1 - mid->phi_g1;
  r.phi_g2_backward = last.phi_g2 - mid->phi_g2;
  r.phi_g1_total = last.phi_g1;
  r.phi_g2_total = last.phi_g2;
  for (const auto& ev : traj.growth) {
    (ev.clock < boundary - eps ? r.units_first_half : r.units_second_half) += ev.appended.size();
  }
  const std::size_t total = r.units_first_half + r.units_second_half;
  r.second_half_fraction = total > 0 ? static_cast<double>(r.units_second_half) / static_cast<double>(total) : 0.0;
  return r;
}

}  // namespace berryloop
