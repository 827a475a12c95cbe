#pragma once

// Exact-diagonalization reference: dense matrices, spectra, exact loop
// propagation, Wilson-loop Berry phases and fidelity readouts.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "berryloop/model.hpp"
#include "berryloop/pauli.hpp"
#include "berryloop/schedule.hpp"

namespace berryloop {

inline constexpr int kDenseQubitCap = 12;

Eigen::MatrixXcd dense_matrix(const PauliSum& h, int cap = kDenseQubitCap);

/// Partition of the basis into sets closed under a Hermitian matrix pattern
/// (e.g. fixed spin-resolved particle numbers for SSHH).
struct BlockStructure {
  std::vector<std::vector<std::uint32_t>> blocks;

  static BlockStructure from_matrices(const std::vector<Eigen::MatrixXcd>& matrices, double tol = 1e-13);
};

struct EdReport {
  double ground_energy = 0.0;
  double gap = 0.0;  // E1 - E0 over the full Fock space
  StateVector ground_state;
  std::vector<double> spectrum;  // ascending
  bool degenerate = false;
};

inline constexpr double kDegeneracyTolerance = 1e-10;

/// Lowest eigenpair with the largest-magnitude amplitude made real positive.
EdReport ground_state(const PauliSum& h, int cap = kDenseQubitCap);

enum class EdScheme {
  endpoint,  // H held at rho of the step end
  midpoint,  // H held at rho of the step middle
  magnus4,   // two-exponential commutator-free scheme on the Gauss nodes, fourth order
};

struct EdPropagateOptions {
  double dt = 0.001;
  EdScheme scheme = EdScheme::magnus4;
  /// Loop-clock values where the state is recorded (sorted, within [0, T]).
  std::vector<double> checkpoints;
};

struct EdTrajectory {
  std::vector<double> clock;
  std::vector<StateVector> states;
  /// -integral <H> dt over each half (trapezoid rule per step); dt < 0 on the backward half.
  double phi_g1_forward = 0.0;
  double phi_g1_backward = 0.0;
  double max_norm_drift = 0.0;
  std::size_t steps = 0;
};

/// Propagation around the loop with signed steps, +dt forward and -dt backward.
/// The piecewise-constant schemes apply exp(-i dt_j H(rho_j)) per step.
EdTrajectory ed_propagate(const StateVector& s, const LoopSchedule& schedule, const TwistFamily& family,
                          const EdPropagateOptions& options = {});

/// -arg prod_j <G_j|G_{j+1}> over a closed list of states (the last links to the first).
double wilson_loop_phase(const std::vector<StateVector>& loop);

/// Wilson loop over an n_grid-point rho grid, reduced to (-pi, pi].
double wilson_loop_berry(const ModelParams& params, int n_grid = 256);

struct TrajectoryRecord;

struct InfidelityReport {
  std::vector<double> infid_f;   // vs instantaneous ground state
  std::vector<double> infid_ft;  // vs exactly propagated state at the same T
  double max_infid_f = 0.0;
  double max_infid_ft = 0.0;
};

double infidelity(const StateVector& a, const StateVector& b);

/// Fills the infid_f / infid_ft slots of every recorded point. Requires snapshots.
InfidelityReport infidelities(TrajectoryRecord& traj, const TwistFamily& family, const LoopSchedule& schedule,
                              const EdPropagateOptions& options = {});

struct AdiabaticProfile {
  std::vector<double> rho;
  std::vector<double> infid;  // exactly propagated state vs instantaneous ground state
  double max_infid = 0.0;
};

/// Exact loop propagation from the rho = 0 ground state, compared with the
/// instantaneous ground state on n_samples + 1 evenly spaced clock values.
AdiabaticProfile ed_adiabatic_profile(const TwistFamily& family, const LoopSchedule& schedule, int n_samples,
                                      const EdPropagateOptions& options = {});

}  // namespace berryloop
