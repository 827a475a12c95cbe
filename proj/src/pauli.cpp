#include "berryloop/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "berryloop/errors.hpp"

namespace berryloop {

namespace {

constexpr cplx kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

int popcount(std::uint64_t v) { return std::popcount(v); }

std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void require_same(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": qubit counts differ (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

// Exponent m such that P|k> = i^m |k ^ x>.
inline int phase_exponent(std::uint64_t k, std::uint64_t x, std::uint64_t z) {
  return (popcount(x & z) + 2 * popcount(k & z)) & 3;
}

}  // namespace

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_qubits_(n_qubits), x_(x_mask), z_(z_mask) {
  if (n_qubits < 0 || n_qubits > 64) {
    throw DimensionError("PauliString: qubit count out of range");
  }
  if ((x_mask | z_mask) & ~low_mask(n_qubits)) {
    throw DimensionError("PauliString: mask exceeds qubit count");
  }
}

PauliString PauliString::from_label(std::string_view label) {
  std::uint64_t x = 0, z = 0;
  for (std::size_t q = 0; q < label.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (label[q]) {
      case 'I': case 'i': break;
      case 'X': case 'x': x |= bit; break;
      case 'Z': case 'z': z |= bit; break;
      case 'Y': case 'y': x |= bit; z |= bit; break;
      default:
        throw std::invalid_argument("PauliString: bad letter in label '" + std::string(label) + "'");
    }
  }
  return {static_cast<int>(label.size()), x, z};
}

PauliString PauliString::single(int n_qubits, int qubit, char letter) {
  std::string label(static_cast<std::size_t>(n_qubits), 'I');
  label.at(static_cast<std::size_t>(qubit)) = letter;
  return from_label(label);
}

char PauliString::letter(int qubit) const {
  const bool xb = (x_ >> qubit) & 1U;
  const bool zb = (z_ >> qubit) & 1U;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

std::string PauliString::label() const {
  std::string out(static_cast<std::size_t>(n_qubits_), 'I');
  for (int q = 0; q < n_qubits_; ++q) out[static_cast<std::size_t>(q)] = letter(q);
  return out;
}

bool operator<(const PauliString& a, const PauliString& b) {
  const int wa = weight(a), wb = weight(b);
  if (wa != wb) return wa < wb;
  if (a.x_mask() != b.x_mask()) return a.x_mask() < b.x_mask();
  if (a.z_mask() != b.z_mask()) return a.z_mask() < b.z_mask();
  return a.n_qubits() < b.n_qubits();
}

PauliProduct pauli_mul(const PauliString& a, const PauliString& b) {
  require_same(a.n_qubits(), b.n_qubits(), "pauli_mul");
  const std::uint64_t xc = a.x_mask() ^ b.x_mask();
  const std::uint64_t zc = a.z_mask() ^ b.z_mask();
  // a*b = i^{|xa&za|+|xb&zb|} (-1)^{|za&xb|} X^{xc} Z^{zc}, and X^{xc} Z^{zc} = i^{-|xc&zc|} P_c.
  const int m = popcount(a.x_mask() & a.z_mask()) + popcount(b.x_mask() & b.z_mask()) +
                2 * popcount(a.z_mask() & b.x_mask()) - popcount(xc & zc);
  return {kIPow[((m % 4) + 4) % 4], PauliString(a.n_qubits(), xc, zc)};
}

bool commutes(const PauliString& a, const PauliString& b) {
  require_same(a.n_qubits(), b.n_qubits(), "commutes");
  const int s = popcount(a.x_mask() & b.z_mask()) + popcount(a.z_mask() & b.x_mask());
  return (s & 1) == 0;
}

int weight(const PauliString& p) { return popcount(p.support()); }

int cnot_cost(const PauliString& p) {
  const int w = weight(p);
  return w <= 1 ? 0 : 2 * (w - 1);
}

// ---------------------------------------------------------------------------

void PauliSum::merge_in(cplx coeff, const PauliString& p) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const Term& t, const PauliString& s) { return t.string < s; });
  if (it != terms_.end() && it->string == p) {
    it->coeff += coeff;
    if (std::abs(it->coeff) < kDropTolerance) terms_.erase(it);
  } else if (std::abs(coeff) >= kDropTolerance) {
    terms_.insert(it, Term{coeff, p});
  }
}

void PauliSum::add(cplx coeff, const PauliString& p) {
  if (terms_.empty() && n_qubits_ == 0) n_qubits_ = p.n_qubits();
  require_same(n_qubits_, p.n_qubits(), "PauliSum::add");
  if (p.is_identity()) {
    offset_ += coeff;
  } else {
    merge_in(coeff, p);
  }
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (n_qubits_ == 0 && terms_.empty()) n_qubits_ = other.n_qubits_;
  require_same(n_qubits_, other.n_qubits_, "PauliSum::operator+=");
  for (const auto& t : other.terms_) merge_in(t.coeff, t.string);
  offset_ += other.offset_;
  return *this;
}

PauliSum& PauliSum::operator*=(cplx s) {
  for (auto& t : terms_) t.coeff *= s;
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.coeff) < kDropTolerance; });
  offset_ *= s;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  require_same(a.n_qubits_, b.n_qubits_, "PauliSum::operator*");
  PauliSum out(a.n_qubits_);
  // Expand (offset_a + sum_a)(offset_b + sum_b).
  out.offset_ = a.offset_ * b.offset_;
  for (const auto& t : b.terms_) out.add(a.offset_ * t.coeff, t.string);
  for (const auto& t : a.terms_) out.add(b.offset_ * t.coeff, t.string);
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      const auto prod = pauli_mul(ta.string, tb.string);
      out.add(ta.coeff * tb.coeff * prod.phase, prod.product);
    }
  }
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coeff = std::conj(t.coeff);
  out.offset_ = std::conj(out.offset_);
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  if (std::abs(offset_.imag()) > tol) return false;
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const Term& t) { return std::abs(t.coeff.imag()) <= tol; });
}

cplx PauliSum::coefficient(const PauliString& p) const {
  if (p.is_identity()) return offset_;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const Term& t, const PauliString& s) { return t.string < s; });
  if (it != terms_.end() && it->string == p) return it->coeff;
  return {0.0, 0.0};
}

std::vector<PauliString> PauliSum::strings() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.string);
  return out;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(int n_qubits)
    : n_qubits_(n_qubits), amp_(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
  amp_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amp_(std::move(amplitudes)) {
  if (amp_.size() != (std::size_t{1} << n_qubits)) {
    throw DimensionError("StateVector: amplitude count must be 2^n_qubits");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw DimensionError("StateVector::basis: index out of range");
  s.amp_[0] = 0.0;
  s.amp_[index] = 1.0;
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amp_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericError("StateVector::normalize: zero or non-finite norm");
  for (auto& a : amp_) a /= n;
}

StateVector& StateVector::operator*=(cplx s) {
  for (auto& a : amp_) a *= s;
  return *this;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionError("inner: dimension mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag(), br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

cplx inner(const StateVector& a, const StateVector& b) {
  return inner(a.amplitudes(), b.amplitudes());
}

double distance(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) acc += std::norm(a[k] - b[k]);
  return std::sqrt(acc);
}

namespace kernels {

void apply_pauli(const PauliString& p, std::span<cplx> amp) {
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const std::size_t dim = amp.size();
  if (x == 0) {
    for (std::size_t k = 0; k < dim; ++k) amp[k] *= kIPow[phase_exponent(k, x, z)];
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t k = 0; k < dim; ++k) {
    if (k & top) continue;
    const std::size_t kp = k ^ x;
    const cplx a = amp[k], b = amp[kp];
    amp[kp] = kIPow[phase_exponent(k, x, z)] * a;
    amp[k] = kIPow[phase_exponent(kp, x, z)] * b;
  }
}

void rotate(double cos_t, double sin_t, const PauliString& p, std::span<cplx> amp) {
  rotate_rows(cos_t, sin_t, p, amp.data(), 1, 1);
}

void rotate_rows(double cos_t, double sin_t, const PauliString& p, cplx* block,
                 std::size_t stride, std::size_t width) {
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  // -i sin * i^m = sin * i^{m-1}
  auto factor = [&](std::uint64_t k) { return sin_t * kIPow[(phase_exponent(k, x, z) + 3) & 3]; };
  if (x == 0) {
    for (std::size_t k = 0; k < dim; ++k) {
      const cplx f = cos_t + factor(k);
      cplx* row = block + k * stride;
      for (std::size_t c = 0; c < width; ++c) row[c] *= f;
    }
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  // The factor is +-sin when |x&z| is odd and +-i sin when it is even.
  const bool real_factor = (std::popcount(x & z) & 1) != 0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (k & top) continue;
    const std::size_t kp = k ^ x;
    // new[kp] = cos a[kp] + f(k) a[k];  new[k] = cos a[k] + f(kp) a[kp]
    const cplx fk = factor(k), fkp = factor(kp);
    double* __restrict rk = reinterpret_cast<double*>(block + k * stride);
    double* __restrict rp = reinterpret_cast<double*>(block + kp * stride);
    if (real_factor) {
      const double a = fk.real(), b = fkp.real();
      for (std::size_t c = 0; c < 2 * width; ++c) {
        const double u = rk[c], v = rp[c];
        rp[c] = cos_t * v + a * u;
        rk[c] = cos_t * u + b * v;
      }
    } else {
      const double a = fk.imag(), b = fkp.imag();
      for (std::size_t c = 0; c < 2 * width; c += 2) {
        const double ur = rk[c], ui = rk[c + 1];
        const double vr = rp[c], vi = rp[c + 1];
        rp[c] = cos_t * vr - a * ui;
        rp[c + 1] = cos_t * vi + a * ur;
        rk[c] = cos_t * ur - b * vi;
        rk[c + 1] = cos_t * ui + b * vr;
      }
    }
  }
}

void accumulate_pauli(cplx c, const PauliString& p, std::span<const cplx> in, std::span<cplx> out) {
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  for (std::size_t k = 0; k < in.size(); ++k) {
    out[k ^ x] += c * kIPow[phase_exponent(k, x, z)] * in[k];
  }
}

cplx pauli_expectation(const PauliString& p, std::span<const cplx> in) {
  const std::uint64_t x = p.x_mask(), z = p.z_mask();
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < in.size(); ++k) {
    acc += std::conj(in[k ^ x]) * kIPow[phase_exponent(k, x, z)] * in[k];
  }
  return acc;
}

}  // namespace kernels

StateVector apply_pauli(const PauliString& p, const StateVector& s) {
  require_same(p.n_qubits(), s.n_qubits(), "apply_pauli");
  StateVector out = s;
  kernels::apply_pauli(p, out.amplitudes());
  return out;
}

StateVector apply_rotation(double theta, const PauliString& p, const StateVector& s) {
  require_same(p.n_qubits(), s.n_qubits(), "apply_rotation");
  if (p.is_identity()) throw InvalidGenerator("apply_rotation: identity generator");
  StateVector out = s;
  kernels::rotate(std::cos(theta), std::sin(theta), p, out.amplitudes());
  return out;
}

StateVector apply_sum(const PauliSum& h, const StateVector& s) {
  require_same(h.n_qubits(), s.n_qubits(), "apply_sum");
  StateVector out = s;
  out *= h.identity_offset();
  for (const auto& t : h.terms()) kernels::accumulate_pauli(t.coeff, t.string, s.amplitudes(), out.amplitudes());
  return out;
}

cplx expectation(const PauliSum& h, const StateVector& s) {
  require_same(h.n_qubits(), s.n_qubits(), "expectation");
  cplx acc = h.identity_offset() * std::norm(s.norm());
  for (const auto& t : h.terms()) acc += t.coeff * kernels::pauli_expectation(t.string, s.amplitudes());
  return acc;
}

double variance(const PauliSum& h, const StateVector& s) {
  require_same(h.n_qubits(), s.n_qubits(), "variance");
  if (!h.is_hermitian(1e-10)) throw ContractError("variance: PauliSum is not Hermitian");
  const PauliSum h2 = h * h;
  const double e = expectation(h, s).real();
  const double v = expectation(h2, s).real() - e * e;
  return std::max(v, 0.0);
}

}  // namespace berryloop
