#include "berryloop/avqds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "berryloop/errors.hpp"

namespace berryloop {

namespace {

constexpr double kMinReduction = 1e-12;

}  // namespace

void DynConfig::validate() const {
  if (!(l2_cut > 0.0)) throw ConfigError("DynConfig: l2_cut must be positive");
  if (!(dtheta_max > 0.0)) throw ConfigError("DynConfig: dtheta_max must be positive");
  if (!(dt_init >= 0.0) || !(dt_max >= 0.0) || !(fixed_dt >= 0.0)) {
    throw ConfigError("DynConfig: step sizes must be non-negative");
  }
  if (!(lambda_reg >= 0.0)) throw ConfigError("DynConfig: lambda_reg must be non-negative");
  if (max_growth_iterations < 1) throw ConfigError("DynConfig: max_growth_iterations must be at least 1");
}

GrowthOutcome screen_and_grow(Ansatz& a, const PauliSum& h, const DynConfig& cfg) {
  GrowthOutcome out;
  const std::uint64_t all_qubits =
      a.n_qubits() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << a.n_qubits()) - 1;
  std::vector<double> scores(cfg.pool.size());
  std::vector<std::size_t> order(cfg.pool.size());

  for (int iter = 0;; ++iter) {
    const Kinematics k = analyze(a, h);
    const EomSystem e = assemble(k, Flow::real_time);
    const RegularizedSolver solver(e.m, cfg.lambda_reg);
    const Eigen::VectorXd theta_dot = solver.solve(e.v);
    const double l2 = mclachlan_distance(e, theta_dot);
    out.l2 = l2;
    auto keep = [&]() {
      out.kinematics = k;
      out.eom = e;
      out.theta_dot = theta_dot;
    };
    if (l2 <= cfg.l2_cut || cfg.pool.size() == 0) {
      keep();
      break;
    }
    if (iter >= cfg.max_growth_iterations) {
      out.saturated = true;
      keep();
      break;
    }

    for (std::size_t i = 0; i < cfg.pool.size(); ++i) {
      scores[i] = distance_with_candidate(k, e, solver, theta_dot, l2, cfg.pool.elements[i]);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
    if (!(l2 - scores[order.front()] > kMinReduction)) {
      out.saturated = true;
      keep();
      break;
    }

    GrowthEvent ev;
    ev.l2_before = l2;
    std::uint64_t covered = 0;
    for (const std::size_t i : order) {
      if (!(l2 - scores[i] > kMinReduction)) break;
      const PauliString& p = cfg.pool.elements[i];
      if ((p.support() & covered) != 0) continue;
      a.append(p, 0.0, Origin::dynamics);
      ev.appended.push_back(p);
      covered |= p.support();
      if (covered == all_qubits) break;
    }
    out.events.push_back(std::move(ev));
  }
  // l2_after of each event is the distance seen at the start of the next iteration.
  for (std::size_t i = 0; i < out.events.size(); ++i) {
    out.events[i].l2_after = i + 1 < out.events.size() ? out.events[i + 1].l2_before : out.l2;
  }
  return out;
}

double adaptive_dt(const Eigen::VectorXd& theta_dot, double dtheta_max, double dt_max) {
  const double peak = theta_dot.size() > 0 ? theta_dot.cwiseAbs().maxCoeff() : 0.0;
  if (!std::isfinite(peak)) throw NumericError("adaptive_dt: non-finite parameter velocity");
  if (peak == 0.0) return dt_max;
  return std::min(dt_max, dtheta_max / peak);
}

StageRates stage_rates(const Kinematics& k, const EomSystem& e, const Eigen::VectorXd& theta_dot) {
  return {theta_dot, k.energy, geometric_phase_rate(e, theta_dot)};
}

void rk4_step(Ansatz& a, const HamiltonianAt& ham_at, double t, double dt, PhaseAccumulator& acc, double lambda,
              const StageRates* first) {
  const std::vector<double> start = a.thetas();
  const auto n = static_cast<Eigen::Index>(start.size());
  const Eigen::Map<const Eigen::VectorXd> theta0(start.data(), n);
  if (first != nullptr && first->theta_dot.size() != n) throw ContractError("rk4_step: stale first stage");

  std::vector<double> buf(start.size());
  auto stage = [&](double tt, const Eigen::VectorXd& theta) {
    Eigen::Map<Eigen::VectorXd>(buf.data(), n) = theta;
    a.set_thetas(buf);
    const Kinematics k = analyze(a, ham_at(tt));
    const EomSystem e = assemble(k, Flow::real_time);
    return stage_rates(k, e, solve_theta_dot(e, lambda));
  };

  const StageRates k1 = first != nullptr ? *first : stage(t, theta0);
  const StageRates k2 = stage(t + 0.5 * dt, theta0 + 0.5 * dt * k1.theta_dot);
  const StageRates k3 = stage(t + 0.5 * dt, theta0 + 0.5 * dt * k2.theta_dot);
  const StageRates k4 = stage(t + dt, theta0 + dt * k3.theta_dot);

  const Eigen::VectorXd theta =
      theta0 + (dt / 6.0) * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot);
  if (!theta.allFinite()) throw NumericError("rk4_step: non-finite parameters");
  Eigen::Map<Eigen::VectorXd>(buf.data(), n) = theta;
  a.set_thetas(buf);
  acc.phi_g1 -= (dt / 6.0) * (k1.energy + 2.0 * k2.energy + 2.0 * k3.energy + k4.energy);
  acc.phi_g2 += (dt / 6.0) * (k1.geometric + 2.0 * k2.geometric + 2.0 * k3.geometric + k4.geometric);
}

EvolveResult evolve(Ansatz& a, const LoopSchedule& schedule, const TwistFamily& family, const DynConfig& cfg) {
  cfg.validate();
  const double period = schedule.period;
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("evolve: loop period must be positive");
  if (family.n_qubits() != a.n_qubits()) throw DimensionError("evolve: ansatz and Hamiltonian qubit counts differ");
  const double dt_max = schedule.dt_max > 0.0 ? schedule.dt_max : period / 200.0;
  const double eps = 1e-12 * period;

  EvolveResult out;
  TrajectoryRecord& rec = out.record;

  auto push_point = [&](std::size_t step, double clock, const Kinematics& k, double l2) {
    TrajectoryPoint p;
    p.step = step;
    p.clock = clock;
    p.t = schedule.time_at(clock);
    p.rho = schedule.rho_at(clock);
    p.energy = k.energy;
    p.l2 = l2;
    p.n_theta = a.size();
    const ResourceCount rc = resource_metrics(a);
    p.cnot = rc.cnot;
    p.depth = rc.depth;
    p.phi_g1 = out.phase.phi_g1;
    p.phi_g2 = out.phase.phi_g2;
    rec.points.push_back(p);
    if (cfg.record_snapshots) rec.snapshots.push_back(k.block.state());
  };

  double clock = 0.0;
  std::size_t step = 0;
  while (clock < period - eps) {
    const Half half = schedule.half_at(clock);
    const double t = schedule.time_at(clock);
    const PauliSum h = family.at(schedule.rho_at(clock));

    GrowthOutcome g = screen_and_grow(a, h, cfg);
    for (auto& ev : g.events) {
      ev.step = step;
      ev.clock = clock;
      rec.growth.push_back(std::move(ev));
    }
    rec.saturated = rec.saturated || g.saturated;

    const Kinematics& k = g.kinematics;
    const EomSystem& e = g.eom;
    const Eigen::VectorXd& theta_dot = g.theta_dot;
    if (!theta_dot.allFinite()) throw NumericError("evolve: non-finite parameter velocity");
    const double l2 = mclachlan_distance(e, theta_dot);
    push_point(step, clock, k, l2);
    rec.max_l2 = std::max(rec.max_l2, l2);

    double ds = 0.0;
    if (cfg.fixed_dt > 0.0) {
      ds = cfg.fixed_dt;
    } else {
      const double cap = (step == 0 && cfg.dt_init > 0.0) ? std::min(cfg.dt_init, dt_max) : dt_max;
      ds = adaptive_dt(theta_dot, cfg.dtheta_max, cap);
    }
    const double target = clock < schedule.boundary() - eps ? schedule.boundary() : period;
    bool lands = false;
    if (clock + ds >= target - eps) {
      ds = target - clock;
      lands = true;
    }
    const HamiltonianAt ham_at = [&family, &schedule, half](double tt) {
      return family.at(schedule.rho_of_time(tt, half));
    };
    const StageRates first = stage_rates(k, e, theta_dot);
    rk4_step(a, ham_at, t, schedule.sign(half) * ds, out.phase, cfg.lambda_reg, &first);
    clock = lands ? target : clock + ds;
    ++step;
  }
  if (std::abs(clock - period) > 1e-9) throw ContractError("evolve: loop clock missed the endpoint");

  const PauliSum h_end = family.at(schedule.rho_at(period));
  const Kinematics k = analyze(a, h_end);
  const EomSystem e = assemble(k, Flow::real_time);
  push_point(step, period, k, mclachlan_distance(e, solve_theta_dot(e, cfg.lambda_reg)));
  return out;
}

}  // namespace berryloop
