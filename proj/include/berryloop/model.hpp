#pragma once

// Dimerized Hubbard ring (SSHH) under Jordan-Wigner, with a twist angle on the
// spin-up boundary bond, plus the two operator pools and the reference state.
//
// Qubit layout: spin-up site j (1-based) is qubit j-1, spin-down site j is
// qubit N+j-1. Occupied orbital = qubit in |1>.

#include <vector>

#include "berryloop/pauli.hpp"

namespace berryloop {

struct ModelParams {
  int n_sites = 4;
  double hopping = 1.0;
  double delta = 0.0;
  double u = 0.0;

  int n_qubits() const { return 2 * n_sites; }
  /// Throws ConfigError on an odd or too-small chain, t <= 0, or |delta| > 1.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

enum class PoolKind { hamiltonian, qubit_excitation };

struct OperatorPool {
  PoolKind kind = PoolKind::hamiltonian;
  std::vector<PauliString> elements;

  std::size_t size() const { return elements.size(); }
};

/// Annihilation operator of qubit mode `q` including its Jordan-Wigner string.
PauliSum annihilation(int n_qubits, int q);
PauliSum creation(int n_qubits, int q);
/// Sum over all modes of n_q = (1 - Z_q)/2.
PauliSum number_operator(int n_qubits);

PauliSum build_sshh(const ModelParams& params, double rho);

/// Probe angle used to read off the Hamiltonian pool; boundary XY/YX strings vanish at rho = 0.
inline constexpr double kPoolProbeAngle = 3.14159265358979323846 / 7.0;

/// H(rho) = constant + cos(rho) cos_part + sin(rho) sin_part. The SSHH twist
/// enters only through e^{i rho} on one bond, so three samples fix the family.
struct TwistFamily {
  PauliSum constant;
  PauliSum cos_part;
  PauliSum sin_part;

  int n_qubits() const { return constant.n_qubits(); }
  PauliSum at(double rho) const;
};

/// Throws ContractError if the three-sample decomposition fails to reproduce build_sshh.
TwistFamily sshh_family(const ModelParams& params);

OperatorPool hamiltonian_pool(const ModelParams& params);
/// Two- and four-qubit strings of X/Y letters with an odd number of Y.
OperatorPool qubit_excitation_pool(int n_qubits);

/// Half filling with alternating spins: up on even sites, down on odd sites.
/// Unlike a block-filled state, it overlaps the ground state on both sides of delta = 0.
StateVector reference_state(const ModelParams& params);

}  // namespace berryloop
