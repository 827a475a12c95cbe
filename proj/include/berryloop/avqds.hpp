#pragma once

// Adaptive real-time variational dynamics around the twist loop: TETRIS-style
// growth from a Pauli pool, adaptive RK4 stepping, and global-phase tracking.

#include <functional>
#include <limits>
#include <vector>

#include "berryloop/ansatz.hpp"
#include "berryloop/model.hpp"
#include "berryloop/schedule.hpp"

namespace berryloop {

struct DynConfig {
  double l2_cut = 1e-4;
  double dtheta_max = 0.01;
  double dt_init = 0.0;   // cap on the first step; 0 means dt_max
  double dt_max = 0.0;    // 0 means period / 200
  double fixed_dt = 0.0;  // > 0 replaces the adaptive rule with a constant step
  double lambda_reg = kDefaultRegularization;
  int max_growth_iterations = 64;
  bool record_snapshots = false;
  OperatorPool pool;

  void validate() const;
};

struct PhaseAccumulator {
  double phi_g1 = 0.0;  // -integral of <H> dt
  double phi_g2 = 0.0;  // integral of the geometric rate
  double phi_g() const { return phi_g1 + phi_g2; }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TrajectoryPoint {
  std::size_t step = 0;
  double clock = 0.0;
  double t = 0.0;
  double rho = 0.0;
  double energy = 0.0;
  double l2 = 0.0;
  std::size_t n_theta = 0;
  int cnot = 0;
  int depth = 0;
  double phi_g1 = 0.0;
  double phi_g2 = 0.0;
  double infid_f = kNaN;
  double infid_ft = kNaN;
};

struct GrowthEvent {
  std::size_t step = 0;
  double clock = 0.0;
  double l2_before = 0.0;
  double l2_after = 0.0;
  std::vector<PauliString> appended;  // one TETRIS iteration
};

/// One point per accepted step (state at the step start) plus the end point.
struct TrajectoryRecord {
  std::vector<TrajectoryPoint> points;
  std::vector<StateVector> snapshots;  // parallel to points when recorded
  std::vector<GrowthEvent> growth;
  bool saturated = false;
  double max_l2 = 0.0;  // over accepted steps, after growth
};

struct GrowthOutcome {
  std::vector<GrowthEvent> events;
  double l2 = 0.0;
  bool saturated = false;
  // Analysis of the final ansatz, reusable as the first RK4 stage.
  Kinematics kinematics;
  EomSystem eom;
  Eigen::VectorXd theta_dot;
};

/// Appends pool generators until the McLachlan distance drops to l2_cut.
/// Each iteration takes the best candidate and then every further candidate, in
/// ascending distance order, that lowers the distance and is disjoint from the
/// ones already taken in that iteration.
GrowthOutcome screen_and_grow(Ansatz& a, const PauliSum& h, const DynConfig& cfg);

double adaptive_dt(const Eigen::VectorXd& theta_dot, double dtheta_max, double dt_max);

using HamiltonianAt = std::function<PauliSum(double)>;

struct StageRates {
  Eigen::VectorXd theta_dot;
  double energy = 0.0;
  double geometric = 0.0;
};

StageRates stage_rates(const Kinematics& k, const EomSystem& e, const Eigen::VectorXd& theta_dot);

/// Classical RK4 in physical time t with a signed step dt. The phase
/// integrals advance on the same four stages. `first`, when given, must hold
/// the rates at (t, current thetas) and saves one evaluation.
void rk4_step(Ansatz& a, const HamiltonianAt& ham_at, double t, double dt, PhaseAccumulator& acc,
              double lambda = kDefaultRegularization, const StageRates* first = nullptr);

struct EvolveResult {
  PhaseAccumulator phase;
  TrajectoryRecord record;
};

EvolveResult evolve(Ansatz& a, const LoopSchedule& schedule, const TwistFamily& family, const DynConfig& cfg);

}  // namespace berryloop
