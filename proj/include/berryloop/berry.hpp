#pragma once

// Full loop protocol: ground-state preparation at rho = 0, variational
// transport around the time-reversed loop, overlap readout and phase assembly.

#include <string>
#include <vector>

#include "berryloop/avqds.hpp"
#include "berryloop/avqite.hpp"
#include "berryloop/ed.hpp"
#include "berryloop/model.hpp"
#include "berryloop/schedule.hpp"

namespace berryloop {

/// dt_max defaults to period / 200 when the config leaves it at zero.
LoopSchedule make_loop_schedule(double period, const DynConfig& cfg);

struct OverlapReadout {
  double p0 = 0.0;         // ancilla |0> probability, (1 + Re z) / 2
  double phi_qc = 0.0;     // arg z
  double magnitude = 0.0;  // |z|
};

/// z = <initial|final>.
OverlapReadout hadamard_overlap(const StateVector& initial, const StateVector& final_state);

/// phi - 2 pi round(phi / 2 pi), with the -pi edge sent to +pi.
double principal_value(double phi);

inline constexpr double kAdiabaticOverlapFloor = 0.5;

struct BerryOptions {
  bool compute_infidelities = false;
  EdPropagateOptions ed;
  /// Global phase put on the reference state before anything runs.
  cplx reference_phase{1.0, 0.0};
};

struct BerryResult {
  double period = 0.0;
  OverlapReadout readout;
  double phi_g1 = 0.0;
  double phi_g2 = 0.0;
  double phi_g = 0.0;
  double phi_b = 0.0;
  double phi_b_principal = 0.0;
  ItReport ground;
  ResourceCount initial_resources;
  ResourceCount final_resources;
  TrajectoryRecord trajectory;
  InfidelityReport infidelity;  // empty unless requested
  std::vector<std::string> warnings;
};

BerryResult run_berry(const ModelParams& params, double period, const ItConfig& cfg_it, const DynConfig& cfg_dyn,
                      const BerryOptions& options = {});

/// Fills unset pools with the defaults: qubit excitations for ground prep, Hamiltonian strings for dynamics.
ItConfig with_default_pool(ItConfig cfg, const ModelParams& params);
DynConfig with_default_pool(DynConfig cfg, const ModelParams& params);

struct SymmetryReport {
  double phi_g1_forward = 0.0;
  double phi_g1_backward = 0.0;
  double phi_g2_forward = 0.0;
  double phi_g2_backward = 0.0;
  double phi_g1_total = 0.0;
  double phi_g2_total = 0.0;
  std::size_t units_first_half = 0;
  std::size_t units_second_half = 0;
  double second_half_fraction = 0.0;  // of units appended during the loop
};

SymmetryReport symmetry_report(const TrajectoryRecord& traj, double period);

}  // namespace berryloop
