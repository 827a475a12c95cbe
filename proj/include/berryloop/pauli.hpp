#pragma once

// Pauli strings in symplectic (x|z) bitmask form, Hermitian-style sums of
// them, and dense statevectors they act on.
//
// Conventions used throughout the library:
//   * qubit q is bit q of a basis index (|k> with bit q = 1 means qubit q is |1>);
//   * the letter on qubit q is I, X, Z, Y for (x_q, z_q) = (0,0), (1,0), (0,1), (1,1);
//   * a string equals i^{|x&z|} X^x Z^z, so Y = iXZ.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace berryloop {

using cplx = std::complex<double>;

class PauliString {
 public:
  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  static PauliString identity(int n_qubits) { return {n_qubits, 0, 0}; }
  /// One letter per qubit, character i acting on qubit i, e.g. "XIZY".
  static PauliString from_label(std::string_view label);
  /// Single letter `letter` on `qubit`, identity elsewhere.
  static PauliString single(int n_qubits, int qubit, char letter);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  std::uint64_t support() const { return x_ | z_; }
  bool is_identity() const { return (x_ | z_) == 0; }
  char letter(int qubit) const;
  std::string label() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  /// Ordering by (weight, x_mask, z_mask); the canonical pool and term order.
  friend bool operator<(const PauliString& a, const PauliString& b);

 private:
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliProduct {
  cplx phase;  // one of +1, -1, +i, -i
  PauliString product;
};

PauliProduct pauli_mul(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);
int weight(const PauliString& p);
/// CNOTs for exp(-i theta P) with all-to-all connectivity: 2(w-1), or 0 when w <= 1.
int cnot_cost(const PauliString& p);

/// Linear combination of Pauli strings with the identity coefficient kept apart.
/// Terms are unique, sorted by PauliString ordering, and never smaller than the
/// drop tolerance in magnitude.
class PauliSum {
 public:
  struct Term {
    cplx coeff;
    PauliString string;
  };

  static constexpr double kDropTolerance = 1e-12;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }
  cplx identity_offset() const { return offset_; }
  std::size_t size() const { return terms_.size(); }

  /// Adds c*P, merging with an existing term; identity goes to the offset.
  void add(cplx coeff, const PauliString& p);
  void add_identity(cplx coeff) { offset_ += coeff; }
  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(cplx s);

  /// Product of two sums, expanded with pauli_mul and merged term by term.
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }

  PauliSum adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  /// Coefficient of `p` (zero when absent). The identity returns the offset.
  cplx coefficient(const PauliString& p) const;
  std::vector<PauliString> strings() const;

 private:
  void merge_in(cplx coeff, const PauliString& p);

  int n_qubits_ = 0;
  std::vector<Term> terms_;
  cplx offset_{0.0, 0.0};
};

class StateVector {
 public:
  StateVector() = default;
  /// |0...0>.
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<cplx> amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amp_.size(); }
  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  cplx& operator[](std::size_t k) { return amp_[k]; }
  const cplx& operator[](std::size_t k) const { return amp_[k]; }

  double norm() const;
  void normalize();
  StateVector& operator*=(cplx s);

 private:
  int n_qubits_ = 0;
  std::vector<cplx> amp_;
};

/// <a|b>.
cplx inner(const StateVector& a, const StateVector& b);
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double distance(const StateVector& a, const StateVector& b);

StateVector apply_pauli(const PauliString& p, const StateVector& s);
/// exp(-i theta P)|s> = cos(theta)|s> - i sin(theta) P|s>.
StateVector apply_rotation(double theta, const PauliString& p, const StateVector& s);
StateVector apply_sum(const PauliSum& h, const StateVector& s);
cplx expectation(const PauliSum& h, const StateVector& s);
/// <H^2> - <H>^2 with H^2 expanded through pauli_mul; clamped at zero.
double variance(const PauliSum& h, const StateVector& s);

namespace kernels {

// In-place raw kernels over amplitude spans; callers check dimensions.
void apply_pauli(const PauliString& p, std::span<cplx> amp);
void rotate(double cos_t, double sin_t, const PauliString& p, std::span<cplx> amp);
/// out += c * P|in>.
void accumulate_pauli(cplx c, const PauliString& p, std::span<const cplx> in, std::span<cplx> out);
/// <in|P|in>.
cplx pauli_expectation(const PauliString& p, std::span<const cplx> in);
/// Same rotation applied to a row-major block whose rows are basis indices and
/// whose first `width` columns are live. Row stride is `stride`.
void rotate_rows(double cos_t, double sin_t, const PauliString& p, cplx* block,
                 std::size_t stride, std::size_t width);

}  // namespace kernels

}  // namespace berryloop
