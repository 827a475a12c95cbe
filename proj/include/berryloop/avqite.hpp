#pragma once

// Adaptive imaginary-time ground-state preparation.

#include <limits>
#include <utility>
#include <vector>

#include "berryloop/ansatz.hpp"
#include "berryloop/model.hpp"

namespace berryloop {

struct ItConfig {
  double dtau = 0.02;
  double l2_cut_it = 1e-2;
  int max_steps = 5000;
  double energy_tol = 1e-8;  // stop once var<H> drops below this
  double lambda_reg = kDefaultRegularization;
  OperatorPool pool;

  void validate() const;
};

struct ItEom {
  EomSystem system;
  Eigen::VectorXd theta_dot;
  double l2_it = 0.0;
};

ItEom it_eom(const Ansatz& a, const PauliSum& h, double lambda = kDefaultRegularization);

struct ItReport {
  double energy = 0.0;
  double variance = 0.0;
  int steps = 0;
  bool converged = false;
  bool saturated = false;  // growth stalled above l2_cut_it at some step
  ResourceCount resources;
  std::size_t n_units = 0;
  std::vector<double> energy_trace;  // energy at the start of every step, then the final energy
  double infidelity = std::numeric_limits<double>::quiet_NaN();  // filled by callers holding a reference state
};

std::pair<Ansatz, ItReport> avqite_run(const PauliSum& h, const StateVector& reference, const ItConfig& cfg);

}  // namespace berryloop
