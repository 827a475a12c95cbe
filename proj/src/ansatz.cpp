#include "berryloop/ansatz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "berryloop/errors.hpp"

namespace berryloop {

Ansatz::Ansatz(StateVector reference)
    : reference_(std::move(reference)),
      qubit_front_(static_cast<std::size_t>(reference_.n_qubits()), 0) {}

void Ansatz::append(const PauliString& generator, double theta, Origin origin) {
  if (generator.n_qubits() != n_qubits()) throw DimensionError("Ansatz::append: qubit count mismatch");
  if (generator.is_identity()) throw InvalidGenerator("Ansatz::append: identity generator");
  int layer = 0;
  const std::uint64_t support = generator.support();
  for (int q = 0; q < n_qubits(); ++q) {
    if ((support >> q) & 1U) layer = std::max(layer, qubit_front_[static_cast<std::size_t>(q)]);
  }
  for (int q = 0; q < n_qubits(); ++q) {
    if ((support >> q) & 1U) qubit_front_[static_cast<std::size_t>(q)] = layer + 1;
  }
  units_.push_back(Unit{generator, theta, origin});
  layer_of_.push_back(layer);
  depth_ = std::max(depth_, layer + 1);
}

std::vector<double> Ansatz::thetas() const {
  std::vector<double> out;
  out.reserve(units_.size());
  for (const auto& u : units_) out.push_back(u.theta);
  return out;
}

void Ansatz::set_thetas(std::span<const double> thetas) {
  if (thetas.size() != units_.size()) throw DimensionError("Ansatz::set_thetas: size mismatch");
  for (std::size_t i = 0; i < units_.size(); ++i) units_[i].theta = thetas[i];
}

StateVector evaluate(const Ansatz& a) {
  StateVector s = a.reference();
  for (const auto& u : a.units()) {
    kernels::rotate(std::cos(u.theta), std::sin(u.theta), u.generator, s.amplitudes());
  }
  return s;
}

// ---------------------------------------------------------------------------

StateVector DerivativeBlock::state() const {
  std::vector<cplx> amp(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) amp[static_cast<std::size_t>(r)] = data(r, 0);
  return {std::countr_zero(amp.size()), std::move(amp)};
}

StateVector DerivativeBlock::derivative(std::size_t mu) const {
  std::vector<cplx> amp(static_cast<std::size_t>(data.rows()));
  const auto col = static_cast<Eigen::Index>(mu + 1);
  for (Eigen::Index r = 0; r < data.rows(); ++r) amp[static_cast<std::size_t>(r)] = data(r, col);
  return {std::countr_zero(amp.size()), std::move(amp)};
}

DerivativeBlock compute_derivatives(const Ansatz& a) {
  const auto dim = static_cast<Eigen::Index>(a.reference().dim());
  const auto n = static_cast<Eigen::Index>(a.size());
  DerivativeBlock out;
  out.data = RowMajorBlock::Zero(dim, n + 1);

  // Intermediate states after each unit, one contiguous column each.
  Eigen::MatrixXcd partial(dim, n);
  std::vector<cplx> current(a.reference().amplitudes().begin(), a.reference().amplitudes().end());
  for (Eigen::Index mu = 0; mu < n; ++mu) {
    const Unit& u = a.units()[static_cast<std::size_t>(mu)];
    kernels::rotate(std::cos(u.theta), std::sin(u.theta), u.generator, current);
    partial.col(mu) = Eigen::Map<const Eigen::VectorXcd>(current.data(), dim);
  }
  for (Eigen::Index r = 0; r < dim; ++r) out.data(r, 0) = current[static_cast<std::size_t>(r)];

  // Column j holds -i A_{j-1} times the state after unit j-1, carried through
  // units j..n-1. Columns are processed in narrow tiles so a tile stays in cache
  // while every later unit sweeps over it.
  constexpr Eigen::Index kTile = 16;
  const std::size_t stride = static_cast<std::size_t>(n + 1);
  std::vector<cplx> column(static_cast<std::size_t>(dim));
  for (Eigen::Index c0 = 1; c0 <= n; c0 += kTile) {
    const Eigen::Index c1 = std::min(n + 1, c0 + kTile);
    for (Eigen::Index j = c0; j < c1; ++j) {
      Eigen::Map<Eigen::VectorXcd>(column.data(), dim) = partial.col(j - 1);
      kernels::apply_pauli(a.units()[static_cast<std::size_t>(j - 1)].generator, column);
      for (Eigen::Index r = 0; r < dim; ++r) out.data(r, j) = cplx{0.0, -1.0} * column[static_cast<std::size_t>(r)];
    }
    for (Eigen::Index mu = c0; mu < n; ++mu) {
      const auto width = static_cast<std::size_t>(std::min(c1, mu + 1) - c0);
      const Unit& u = a.units()[static_cast<std::size_t>(mu)];
      kernels::rotate_rows(std::cos(u.theta), std::sin(u.theta), u.generator, out.data.data() + c0, stride, width);
    }
  }
  return out;
}

std::vector<StateVector> derivative_states(const Ansatz& a) {
  const DerivativeBlock block = compute_derivatives(a);
  std::vector<StateVector> out;
  out.reserve(a.size());
  for (std::size_t mu = 0; mu < a.size(); ++mu) out.push_back(block.derivative(mu));
  return out;
}

Kinematics analyze(const Ansatz& a, const PauliSum& h) {
  if (h.n_qubits() != a.n_qubits()) throw DimensionError("analyze: Hamiltonian and ansatz qubit counts differ");
  Kinematics k;
  k.block = compute_derivatives(a);
  const StateVector psi = k.block.state();
  k.hpsi = apply_sum(h, psi);
  const cplx e = inner(psi, k.hpsi);
  k.energy = e.real();
  k.var_h = std::max(0.0, std::norm(k.hpsi.norm()) - k.energy * k.energy);

  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  const Eigen::Index dim = k.block.data.rows();
  const auto derivs = k.block.data.rightCols(n);
  Eigen::Map<const Eigen::VectorXcd> psi_v(psi.amplitudes().data(), dim);
  Eigen::Map<const Eigen::VectorXcd> hpsi_v(k.hpsi.amplitudes().data(), dim);

  k.gram = Eigen::MatrixXcd::Zero(n, n);
  if (n > 0) {
    k.gram.selfadjointView<Eigen::Lower>().rankUpdate(derivs.adjoint());
    k.gram.triangularView<Eigen::StrictlyUpper>() = k.gram.adjoint();
  }
  k.dpsi = derivs.adjoint() * psi_v;
  k.dh = derivs.adjoint() * hpsi_v;
  return k;
}

EomSystem assemble(const Kinematics& k, Flow flow) {
  const Eigen::Index n = k.gram.rows();
  EomSystem e;
  e.flow = flow;
  e.energy = k.energy;
  e.var_h = k.var_h;
  e.dpsi = k.dpsi;
  // <d_mu|Psi><d_nu|Psi> (no conjugation) carries the global-phase projection.
  const Eigen::MatrixXcd phase_part = k.dpsi * k.dpsi.transpose();
  const double scale = flow == Flow::real_time ? 2.0 : 1.0;
  e.m = scale * (k.gram + phase_part).real();
  e.m = 0.5 * (e.m + e.m.transpose()).eval();
  e.v.resize(n);
  if (flow == Flow::real_time) {
    // 2 Im[<d_mu|H|Psi> + <Psi|d_mu> <H>]
    e.v = 2.0 * (k.dh + k.dpsi.conjugate() * k.energy).imag();
    e.base = 2.0 * k.var_h;
  } else {
    e.v = -k.dh.real() + k.energy * k.dpsi.real();
    e.base = k.var_h;
  }
  return e;
}

EomSystem assemble_eom(const Ansatz& a, const PauliSum& h) { return assemble(analyze(a, h), Flow::real_time); }

RegularizedSolver::RegularizedSolver(const Eigen::MatrixXd& m, double lambda) : lambda_(lambda), n_(m.rows()) {
  if (n_ > 0) {
    if (!m.allFinite()) throw NumericError("RegularizedSolver: non-finite matrix");
    Eigen::MatrixXd reg = m;
    reg.diagonal().array() += lambda;
    ldlt_.compute(reg);
    if (ldlt_.info() != Eigen::Success) throw NumericError("RegularizedSolver: factorization failed");
  }
}

Eigen::VectorXd RegularizedSolver::solve(const Eigen::VectorXd& rhs) const {
  if (n_ == 0) return Eigen::VectorXd(0);
  return ldlt_.solve(rhs);
}

Eigen::VectorXd solve_theta_dot(const EomSystem& e, double lambda) {
  if (!e.v.allFinite() || !e.m.allFinite()) throw NumericError("solve_theta_dot: non-finite entries");
  Eigen::VectorXd x = RegularizedSolver(e.m, lambda).solve(e.v);
  if (!x.allFinite()) throw NumericError("solve_theta_dot: non-finite solution");
  return x;
}

double mclachlan_distance(const EomSystem& e, const Eigen::VectorXd& theta_dot) {
  const double vt = e.v.size() > 0 ? e.v.dot(theta_dot) : 0.0;
  return std::max(0.0, e.base - vt);
}

double mclachlan_quadratic(const EomSystem& e, const Eigen::VectorXd& theta_dot) {
  if (e.v.size() == 0) return e.base;
  return theta_dot.dot(e.m * theta_dot) - 2.0 * e.v.dot(theta_dot) + e.base;
}

double geometric_phase_rate(const EomSystem& e, const Eigen::VectorXd& theta_dot) {
  if (e.dpsi.size() == 0) return 0.0;
  return (e.dpsi.transpose() * theta_dot.cast<cplx>()).value().imag();
}

double distance_with_candidate(const Kinematics& k, const EomSystem& e, const RegularizedSolver& solver,
                               const Eigen::VectorXd& theta_dot, double current_distance,
                               const PauliString& candidate) {
  const Eigen::Index dim = k.block.data.rows();
  const Eigen::Index n = k.gram.rows();

  // New derivative direction: appended last at theta = 0, so d_new = -i A |Psi>.
  Eigen::VectorXcd d_new(dim);
  for (Eigen::Index r = 0; r < dim; ++r) d_new(r) = k.block.data(r, 0);
  kernels::apply_pauli(candidate, std::span<cplx>(d_new.data(), static_cast<std::size_t>(dim)));
  d_new *= cplx{0.0, -1.0};

  cplx g_new{0.0, 0.0}, h_new{0.0, 0.0};
  for (Eigen::Index r = 0; r < dim; ++r) {
    g_new += std::conj(d_new(r)) * k.block.data(r, 0);
    h_new += std::conj(d_new(r)) * k.hpsi[static_cast<std::size_t>(r)];
  }
  const double scale = e.flow == Flow::real_time ? 2.0 : 1.0;
  const double c = scale * (d_new.squaredNorm() + (g_new * g_new).real());
  double w = 0.0;
  if (e.flow == Flow::real_time) {
    w = 2.0 * (h_new + std::conj(g_new) * k.energy).imag();
  } else {
    w = -h_new.real() + k.energy * g_new.real();
  }

  if (n == 0) {
    const double s = c + solver.lambda();
    if (!(s > 0.0)) return current_distance;
    return std::max(0.0, current_distance - w * w / s);
  }
  const auto derivs = k.block.data.rightCols(n);
  const Eigen::VectorXcd cross = derivs.adjoint() * d_new;
  const Eigen::VectorXd b = scale * (cross + k.dpsi * g_new).real();
  const double s = c + solver.lambda() - b.dot(solver.solve(b));
  if (!(s > 0.0)) return current_distance;
  const double r = w - b.dot(theta_dot);
  return std::max(0.0, current_distance - r * r / s);
}

ResourceCount resource_metrics(const Ansatz& a) {
  ResourceCount rc;
  for (const auto& u : a.units()) rc.cnot += cnot_cost(u.generator);
  rc.depth = a.depth();
  return rc;
}

}  // namespace berryloop
