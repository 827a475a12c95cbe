#pragma once

// Pseudo-Trotter ansatz prod_mu exp(-i theta_mu A_mu)|ref> and the McLachlan
// machinery built on its derivative states.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "berryloop/pauli.hpp"

namespace berryloop {

enum class Origin { ground_prep, dynamics };

struct Unit {
  PauliString generator;
  double theta = 0.0;
  Origin origin = Origin::dynamics;
};

/// Units are applied in order (unit 0 first). Layers follow ASAP scheduling:
/// a unit lands one layer after the latest earlier unit sharing a qubit with it.
class Ansatz {
 public:
  Ansatz() = default;
  explicit Ansatz(StateVector reference);

  const StateVector& reference() const { return reference_; }
  int n_qubits() const { return reference_.n_qubits(); }
  const std::vector<Unit>& units() const { return units_; }
  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }

  void append(const PauliString& generator, double theta, Origin origin);
  /// Multiplies the reference by a global phase.
  void rephase_reference(cplx phase) { reference_ *= phase; }

  std::vector<double> thetas() const;
  void set_thetas(std::span<const double> thetas);

  /// Zero-based layer of unit i.
  int layer_of(std::size_t i) const { return layer_of_[i]; }
  int depth() const { return depth_; }

 private:
  StateVector reference_;
  std::vector<Unit> units_;
  std::vector<int> layer_of_;
  std::vector<int> qubit_front_;  // number of layers already touching each qubit
  int depth_ = 0;
};

StateVector evaluate(const Ansatz& a);

using RowMajorBlock = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Column 0 holds |Psi>, column mu+1 holds d|Psi>/d theta_mu.
/// Rows are basis indices so one rotation updates every column at once.
struct DerivativeBlock {
  RowMajorBlock data;

  std::size_t n_params() const { return static_cast<std::size_t>(data.cols()) - 1; }
  StateVector state() const;
  StateVector derivative(std::size_t mu) const;
};

DerivativeBlock compute_derivatives(const Ansatz& a);
std::vector<StateVector> derivative_states(const Ansatz& a);

/// Everything the equations of motion need at one point of parameter space.
struct Kinematics {
  DerivativeBlock block;
  StateVector hpsi;        // H|Psi>
  double energy = 0.0;     // <H>
  double var_h = 0.0;      // <H^2> - <H>^2, clamped at zero
  Eigen::MatrixXcd gram;   // <d_mu Psi | d_nu Psi>
  Eigen::VectorXcd dpsi;   // <d_mu Psi | Psi>
  Eigen::VectorXcd dh;     // <d_mu Psi | H | Psi>
};

Kinematics analyze(const Ansatz& a, const PauliSum& h);

/// Real-time McLachlan flow or its imaginary-time counterpart.
enum class Flow { real_time, imaginary_time };

struct EomSystem {
  Flow flow = Flow::real_time;
  Eigen::MatrixXd m;
  Eigen::VectorXd v;
  double var_h = 0.0;
  double energy = 0.0;
  /// Residual at theta_dot = 0: 2 var_h for real time, var_h for imaginary time.
  double base = 0.0;
  Eigen::VectorXcd dpsi;  // <d_mu Psi | Psi>, carried for the global-phase rate
};

EomSystem assemble(const Kinematics& k, Flow flow);
EomSystem assemble_eom(const Ansatz& a, const PauliSum& h);

inline constexpr double kDefaultRegularization = 1e-6;

/// Factorization of M + lambda I, reused by candidate screening.
class RegularizedSolver {
 public:
  RegularizedSolver(const Eigen::MatrixXd& m, double lambda);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double lambda() const { return lambda_; }

 private:
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  double lambda_;
  Eigen::Index n_;
};

/// theta_dot = (M + lambda I)^{-1} V.
Eigen::VectorXd solve_theta_dot(const EomSystem& e, double lambda = kDefaultRegularization);

/// Optimized distance: base - V . theta_dot, clamped at zero.
double mclachlan_distance(const EomSystem& e, const Eigen::VectorXd& theta_dot);
/// Unminimized quadratic form theta_dot^T M theta_dot - 2 V . theta_dot + base.
double mclachlan_quadratic(const EomSystem& e, const Eigen::VectorXd& theta_dot);
/// Im sum_mu <d_mu Psi|Psi> theta_dot_mu, the geometric part of the global-phase rate.
double geometric_phase_rate(const EomSystem& e, const Eigen::VectorXd& theta_dot);

/// Distance after appending exp(-i theta A) (theta = 0) at the end of the ansatz,
/// given the current system, its factorization and its solution.
double distance_with_candidate(const Kinematics& k, const EomSystem& e, const RegularizedSolver& solver,
                               const Eigen::VectorXd& theta_dot, double current_distance,
                               const PauliString& candidate);

struct ResourceCount {
  int cnot = 0;
  int depth = 0;
};

ResourceCount resource_metrics(const Ansatz& a);

}  // namespace berryloop
