#include "berryloop/avqite.hpp"

#include <algorithm>
#include <cmath>

#include "berryloop/errors.hpp"

namespace berryloop {

namespace {

constexpr double kMinReduction = 1e-12;

struct ScreenResult {
  std::size_t index = 0;
  double l2 = 0.0;
  bool found = false;
};

ScreenResult best_candidate(const Kinematics& k, const EomSystem& e, const RegularizedSolver& solver,
                            const Eigen::VectorXd& theta_dot, double l2, const OperatorPool& pool) {
  ScreenResult best;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double d = distance_with_candidate(k, e, solver, theta_dot, l2, pool.elements[i]);
    if (!best.found || d < best.l2) {
      best = {i, d, true};
    }
  }
  return best;
}

}  // namespace

void ItConfig::validate() const {
  if (!(dtau > 0.0)) throw ConfigError("ItConfig: dtau must be positive");
  if (!(l2_cut_it > 0.0)) throw ConfigError("ItConfig: l2_cut_it must be positive");
  if (max_steps < 0) throw ConfigError("ItConfig: max_steps must be non-negative");
  if (!(energy_tol > 0.0)) throw ConfigError("ItConfig: energy_tol must be positive");
  if (!(lambda_reg >= 0.0)) throw ConfigError("ItConfig: lambda_reg must be non-negative");
}

ItEom it_eom(const Ansatz& a, const PauliSum& h, double lambda) {
  ItEom out;
  out.system = assemble(analyze(a, h), Flow::imaginary_time);
  out.theta_dot = solve_theta_dot(out.system, lambda);
  out.l2_it = mclachlan_distance(out.system, out.theta_dot);
  return out;
}

std::pair<Ansatz, ItReport> avqite_run(const PauliSum& h, const StateVector& reference, const ItConfig& cfg) {
  cfg.validate();
  if (!h.is_hermitian()) throw ContractError("avqite_run: Hamiltonian is not Hermitian");
  if (reference.n_qubits() != h.n_qubits()) throw DimensionError("avqite_run: reference and Hamiltonian differ");
  for (const auto& p : cfg.pool.elements) {
    if (p.n_qubits() != h.n_qubits()) throw DimensionError("avqite_run: pool element has the wrong qubit count");
  }

  Ansatz a(reference);
  ItReport rep;
  for (int step = 0;; ++step) {
    Kinematics k = analyze(a, h);
    EomSystem e = assemble(k, Flow::imaginary_time);
    rep.energy_trace.push_back(k.energy);
    rep.energy = k.energy;
    rep.variance = k.var_h;
    if (k.var_h < cfg.energy_tol) {
      rep.converged = true;
      break;
    }
    if (step >= cfg.max_steps) break;

    RegularizedSolver solver(e.m, cfg.lambda_reg);
    Eigen::VectorXd theta_dot = solver.solve(e.v);
    double l2 = mclachlan_distance(e, theta_dot);
    while (l2 > cfg.l2_cut_it && !cfg.pool.elements.empty()) {
      const ScreenResult best = best_candidate(k, e, solver, theta_dot, l2, cfg.pool);
      if (!(l2 - best.l2 > kMinReduction)) {
        rep.saturated = true;
        break;
      }
      a.append(cfg.pool.elements[best.index], 0.0, Origin::ground_prep);
      k = analyze(a, h);
      e = assemble(k, Flow::imaginary_time);
      solver = RegularizedSolver(e.m, cfg.lambda_reg);
      theta_dot = solver.solve(e.v);
      l2 = mclachlan_distance(e, theta_dot);
    }
    if (!theta_dot.allFinite()) throw NumericError("avqite_run: non-finite parameter velocity");

    std::vector<double> th = a.thetas();
    for (std::size_t i = 0; i < th.size(); ++i) th[i] += cfg.dtau * theta_dot(static_cast<Eigen::Index>(i));
    a.set_thetas(th);
    rep.steps = step + 1;
  }
  rep.resources = resource_metrics(a);
  rep.n_units = a.size();
  return {std::move(a), std::move(rep)};
}

}  // namespace berryloop
