#pragma once

// Dense reference implementations used only by tests. They rebuild operators
// letter by letter from 2x2 tables and never touch the bitmask kernels.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "berryloop/ansatz.hpp"
#include "berryloop/pauli.hpp"

namespace oracle {

using berryloop::cplx;
using berryloop::PauliString;
using berryloop::PauliSum;
using berryloop::StateVector;

inline Eigen::Matrix2cd letter_matrix(char c) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

/// <row|P|col> = prod_q letter_q[row_q][col_q].
inline Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
  const int n = p.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Matrix2cd> letters;
  for (int q = 0; q < n; ++q) letters.push_back(letter_matrix(p.letter(q)));
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      cplx v(1.0, 0.0);
      for (int q = 0; q < n && v != cplx(0.0, 0.0); ++q) v *= letters[q]((r >> q) & 1, (c >> q) & 1);
      m(r, c) = v;
    }
  }
  return m;
}

inline Eigen::MatrixXcd sum_matrix(const PauliSum& h) {
  const std::size_t dim = std::size_t{1} << h.n_qubits();
  Eigen::MatrixXcd m = h.identity_offset() * Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& t : h.terms()) m += t.coeff * pauli_matrix(t.string);
  return m;
}

inline Eigen::VectorXcd vec(const StateVector& s) {
  Eigen::VectorXcd v(s.dim());
  for (std::size_t k = 0; k < s.dim(); ++k) v(k) = s[k];
  return v;
}

inline StateVector state(int n_qubits, const Eigen::VectorXcd& v) {
  std::vector<cplx> a(v.data(), v.data() + v.size());
  return StateVector(n_qubits, std::move(a));
}

/// exp(-i t H) for Hermitian H through its eigendecomposition.
inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(cplx(0.0, -t * es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline PauliString random_string(std::mt19937_64& rng, int n, bool allow_identity = false) {
  std::uniform_int_distribution<std::uint64_t> d(0, (std::uint64_t{1} << n) - 1);
  for (;;) {
    PauliString p(n, d(rng), d(rng));
    if (allow_identity || !p.is_identity()) return p;
  }
}

inline StateVector random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<cplx> a(std::size_t{1} << n);
  for (auto& x : a) x = cplx(g(rng), g(rng));
  StateVector s(n, std::move(a));
  s.normalize();
  return s;
}

inline berryloop::Ansatz random_ansatz(std::mt19937_64& rng, const StateVector& ref, int units) {
  berryloop::Ansatz a(ref);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < units; ++i) a.append(random_string(rng, ref.n_qubits()), u(rng), berryloop::Origin::dynamics);
  return a;
}

/// Random Hermitian sum with real coefficients on n qubits.
inline PauliSum random_hamiltonian(std::mt19937_64& rng, int n, int terms) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PauliSum h(n);
  for (int i = 0; i < terms; ++i) h.add(u(rng), random_string(rng, n));
  h.add_identity(u(rng));
  return h;
}

/// Derivative states by central differences of evaluate().
inline std::vector<Eigen::VectorXcd> fd_derivatives(const berryloop::Ansatz& a, double step) {
  std::vector<Eigen::VectorXcd> out;
  const auto base = a.thetas();
  for (std::size_t mu = 0; mu < base.size(); ++mu) {
    auto plus = base, minus = base;
    plus[mu] += step;
    minus[mu] -= step;
    berryloop::Ansatz ap = a, am = a;
    ap.set_thetas(plus);
    am.set_thetas(minus);
    out.push_back((vec(berryloop::evaluate(ap)) - vec(berryloop::evaluate(am))) / (2.0 * step));
  }
  return out;
}

/// Product-formula derivative from dense matrices.
/// Product-formula derivative states from dense matrices.
inline std::vector<Eigen::VectorXcd> dense_derivatives(const berryloop::Ansatz& a) {
  std::vector<Eigen::MatrixXcd> rot, gen;
  for (const auto& u : a.units()) {
    gen.push_back(pauli_matrix(u.generator));
    rot.push_back(expm_hermitian(gen.back(), u.theta));
  }
  std::vector<Eigen::VectorXcd> out;
  for (std::size_t mu = 0; mu < a.size(); ++mu) {
    Eigen::VectorXcd v = vec(a.reference());
    for (std::size_t nu = 0; nu <= mu; ++nu) v = rot[nu] * v;
    v = -cplx(0.0, 1.0) * (gen[mu] * v);
    for (std::size_t nu = mu + 1; nu < a.size(); ++nu) v = rot[nu] * v;
    out.push_back(v);
  }
  return out;
}

struct DenseEom {
  Eigen::MatrixXd m;
  Eigen::VectorXd v;
  double energy;
  double var;
};

inline DenseEom dense_eom(const berryloop::Ansatz& a, const PauliSum& h, const std::vector<Eigen::VectorXcd>& d) {
  const Eigen::VectorXcd psi = vec(berryloop::evaluate(a));
  const Eigen::MatrixXcd hm = sum_matrix(h);
  const Eigen::VectorXcd hpsi = hm * psi;
  DenseEom e;
  e.energy = psi.dot(hpsi).real();
  e.var = hpsi.squaredNorm() - e.energy * e.energy;
  const auto n = static_cast<Eigen::Index>(d.size());
  e.m.resize(n, n);
  e.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      e.m(i, j) = 2.0 * (d[i].dot(d[j]) + d[i].dot(psi) * d[j].dot(psi)).real();
    }
    e.v(i) = 2.0 * (d[i].dot(hpsi) + psi.dot(d[i]) * e.energy).imag();
  }
  return e;
}

/// 2 || Psi_dot - <Psi|Psi_dot> Psi + i (H - E) Psi ||^2 with Psi_dot = sum_mu theta_dot_mu d_mu Psi.
inline double dense_mclachlan(const berryloop::Ansatz& a, const PauliSum& h, const std::vector<Eigen::VectorXcd>& d,
                              const Eigen::VectorXd& theta_dot) {
  const Eigen::VectorXcd psi = vec(berryloop::evaluate(a));
  const Eigen::MatrixXcd hm = sum_matrix(h);
  const double energy = psi.dot(hm * psi).real();
  Eigen::VectorXcd dot = Eigen::VectorXcd::Zero(psi.size());
  for (std::size_t mu = 0; mu < d.size(); ++mu) dot += theta_dot(mu) * d[mu];
  const Eigen::VectorXcd r = dot - psi.dot(dot) * psi + cplx(0.0, 1.0) * (hm * psi - energy * psi);
  return 2.0 * r.squaredNorm();
}

}  // namespace oracle
