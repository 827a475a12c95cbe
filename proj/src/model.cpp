#include "berryloop/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "berryloop/errors.hpp"

namespace berryloop {

void ModelParams::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw ConfigError("model: number of sites must be even and >= 2, got " + std::to_string(n_sites));
  }
  if (!(hopping > 0.0)) throw ConfigError("model: hopping must be positive");
  if (!(std::abs(delta) <= 1.0)) throw ConfigError("model: dimerization must lie in [-1, 1]");
  if (!std::isfinite(u)) throw ConfigError("model: interaction must be finite");
  if (n_qubits() > 62) throw ConfigError("model: too many sites for the bitmask representation");
}

PauliSum annihilation(int n_qubits, int q) {
  std::uint64_t zstring = (std::uint64_t{1} << q) - 1;
  const std::uint64_t bit = std::uint64_t{1} << q;
  PauliSum c(n_qubits);
  // |0><1| = (X + iY)/2 on qubit q, Z on every lower qubit.
  c.add(0.5, PauliString(n_qubits, bit, zstring));
  c.add(cplx{0.0, 0.5}, PauliString(n_qubits, bit, zstring | bit));
  return c;
}

PauliSum creation(int n_qubits, int q) { return annihilation(n_qubits, q).adjoint(); }

PauliSum number_operator(int n_qubits) {
  PauliSum n(n_qubits);
  for (int q = 0; q < n_qubits; ++q) {
    n.add_identity(0.5);
    n.add(-0.5, PauliString::single(n_qubits, q, 'Z'));
  }
  return n;
}

PauliSum build_sshh(const ModelParams& params, double rho) {
  params.validate();
  const int n = params.n_sites;
  const int nq = params.n_qubits();
  PauliSum h(nq);

  for (int spin = 0; spin < 2; ++spin) {
    const int offset = spin * n;
    for (int j = 1; j <= n; ++j) {
      // Bond j-1 in zero-based site labels: t(1 + (-1)^(j-1) delta), so the twisted
      // boundary bond is t(1 - delta), the strong bond when delta < 0.
      const double amp = params.hopping * (1.0 + ((j % 2 == 1) ? 1.0 : -1.0) * params.delta);
      const int from = offset + j - 1;
      const int to = offset + (j % n);  // site j+1, wrapping N+1 -> 1
      cplx coeff = amp;
      if (j == n && spin == 0) coeff *= std::polar(1.0, rho);
      // coeff * c^dag_{j+1} c_j + h.c.
      PauliSum hop = creation(nq, to) * annihilation(nq, from);
      hop *= coeff;
      h += hop;
      h += hop.adjoint();
    }
  }

  if (params.u != 0.0) {
    for (int j = 0; j < n; ++j) {
      const auto zz = PauliString(nq, 0, (std::uint64_t{1} << j) | (std::uint64_t{1} << (j + n)));
      h.add(params.u / 4.0, zz);
      h.add_identity(-params.u / 4.0);
    }
  }

  // Fold round-off imaginary parts of Hermitian coefficients.
  PauliSum clean(nq);
  for (const auto& t : h.terms()) clean.add(t.coeff.real(), t.string);
  clean.add_identity(h.identity_offset().real());
  return clean;
}

PauliSum TwistFamily::at(double rho) const {
  PauliSum out = constant;
  PauliSum c = cos_part;
  c *= std::cos(rho);
  PauliSum s = sin_part;
  s *= std::sin(rho);
  out += c;
  out += s;
  return out;
}

TwistFamily sshh_family(const ModelParams& params) {
  constexpr double kPi = 3.14159265358979323846;
  const PauliSum h0 = build_sshh(params, 0.0);
  const PauliSum hpi = build_sshh(params, kPi);
  const PauliSum hhalf = build_sshh(params, kPi / 2.0);

  TwistFamily f;
  f.constant = h0 + hpi;
  f.constant *= 0.5;
  PauliSum neg_pi = hpi;
  neg_pi *= -1.0;
  f.cos_part = h0 + neg_pi;
  f.cos_part *= 0.5;
  PauliSum neg_const = f.constant;
  neg_const *= -1.0;
  f.sin_part = hhalf + neg_const;

  // Check at a generic angle.
  PauliSum diff = f.at(kPoolProbeAngle);
  PauliSum probe = build_sshh(params, kPoolProbeAngle);
  probe *= -1.0;
  diff += probe;
  if (std::abs(diff.identity_offset()) > 1e-12) throw ContractError("sshh_family: decomposition mismatch");
  for (const auto& t : diff.terms()) {
    if (std::abs(t.coeff) > 1e-12) throw ContractError("sshh_family: decomposition mismatch");
  }
  return f;
}

OperatorPool hamiltonian_pool(const ModelParams& params) {
  const PauliSum h = build_sshh(params, kPoolProbeAngle);
  return {PoolKind::hamiltonian, h.strings()};
}

OperatorPool qubit_excitation_pool(int n_qubits) {
  if (n_qubits < 2) throw ConfigError("qubit_excitation_pool: need at least 2 qubits");
  if (n_qubits > 62) throw ConfigError("qubit_excitation_pool: too many qubits");
  OperatorPool pool{PoolKind::qubit_excitation, {}};

  auto emit = [&](const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    for (int letters = 0; letters < (1 << k); ++letters) {
      // bit b of `letters` set -> Y on qubits[b], else X
      if (std::popcount(static_cast<unsigned>(letters)) % 2 == 0) continue;
      std::uint64_t x = 0, z = 0;
      for (int b = 0; b < k; ++b) {
        const std::uint64_t bit = std::uint64_t{1} << qubits[static_cast<std::size_t>(b)];
        x |= bit;
        if ((letters >> b) & 1) z |= bit;
      }
      pool.elements.emplace_back(n_qubits, x, z);
    }
  };

  for (int i = 0; i < n_qubits; ++i)
    for (int j = i + 1; j < n_qubits; ++j) emit({i, j});
  for (int i = 0; i < n_qubits; ++i)
    for (int j = i + 1; j < n_qubits; ++j)
      for (int k = j + 1; k < n_qubits; ++k)
        for (int l = k + 1; l < n_qubits; ++l) emit({i, j, k, l});

  std::sort(pool.elements.begin(), pool.elements.end());
  return pool;
}

StateVector reference_state(const ModelParams& params) {
  params.validate();
  const int n = params.n_sites;
  std::uint64_t index = 0;
  // Spin up on even sites, spin down on odd sites: every site singly occupied.
  for (int j = 0; j < n; j += 2) {
    index |= std::uint64_t{1} << j;
    index |= std::uint64_t{1} << (n + j + 1);
  }
  return StateVector::basis(params.n_qubits(), index);
}

}  // namespace berryloop
