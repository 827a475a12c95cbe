#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "berryloop/ed.hpp"
#include "berryloop/errors.hpp"
#include "berryloop/model.hpp"
#include "oracle.hpp"

using namespace berryloop;

namespace {

ModelParams params(double delta, double u = 0.0) {
  ModelParams p;
  p.delta = delta;
  p.u = u;
  return p;
}

std::vector<double> spectrum(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::sum_matrix(h));
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(params(-0.3).validate());
  ModelParams odd = params(0.1);
  odd.n_sites = 3;
  EXPECT_THROW(odd.validate(), ConfigError);
  EXPECT_THROW(params(1.5).validate(), ConfigError);
  ModelParams t0 = params(0.1);
  t0.hopping = 0.0;
  EXPECT_THROW(t0.validate(), ConfigError);
}

TEST(JordanWigner, CanonicalAnticommutation) {
  const int n = 4;
  const auto id = Eigen::MatrixXcd::Identity(16, 16);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const auto a = oracle::sum_matrix(annihilation(n, p));
      const auto b = oracle::sum_matrix(annihilation(n, q));
      const auto bd = oracle::sum_matrix(creation(n, q));
      EXPECT_LE((a * b + b * a).norm(), 1e-13);
      const Eigen::MatrixXcd expected = (p == q) ? Eigen::MatrixXcd(id) : Eigen::MatrixXcd::Zero(16, 16);
      EXPECT_LE((a * bd + bd * a - expected).norm(), 1e-13);
    }
  }
}

TEST(JordanWigner, NumberOperatorCountsSetBits) {
  const auto n = number_operator(3);
  for (std::uint64_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(expectation(n, StateVector::basis(3, k)).real(), std::popcount(k), 1e-14);
  }
}

TEST(Sshh, HermitianAndPeriodic) {
  const auto p = params(-0.3, 10.0);
  const auto h = build_sshh(p, 0.7);
  const auto m = oracle::sum_matrix(h);
  EXPECT_LE((m - m.adjoint()).norm(), 1e-12);
  const auto h2 = build_sshh(p, 0.7 + 2.0 * std::numbers::pi);
  ASSERT_EQ(h.size(), h2.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(h.terms()[i].string, h2.terms()[i].string);
    EXPECT_LE(std::abs(h.terms()[i].coeff - h2.terms()[i].coeff), 1e-12);
  }
  for (const auto& t : h.terms()) EXPECT_LE(std::abs(t.coeff.imag()), 1e-15);
}

TEST(Sshh, StringCountsAtGenericTwist) {
  EXPECT_EQ(build_sshh(params(-0.3), kPoolProbeAngle).size(), 18u);
  EXPECT_EQ(build_sshh(params(0.6, 10.0), kPoolProbeAngle).size(), 22u);
}

TEST(Sshh, BandFillingGroundEnergy) {
  const auto ev = spectrum(build_sshh(params(-0.5), 0.0));
  EXPECT_NEAR(ev.front(), -6.0, 1e-10);
}

TEST(Sshh, ParticleHoleSymmetricSpectrum) {
  const auto ev = spectrum(build_sshh(params(-0.3), 1.1));
  for (std::size_t k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev[k], -ev[ev.size() - 1 - k], 1e-10);
}

TEST(Sshh, StrongBoundaryBondCarriesTheTwistForNegativeDelta) {
  // Zero-based site labels: bond j joins sites j and j+1 with t(1 + (-1)^j delta),
  // so the boundary bond is t(1 - delta).
  const double delta = -0.3;
  const auto h = build_sshh(params(delta), 0.0);
  const auto boundary = PauliString::from_label("XZZXIIII");
  const auto inner = PauliString::from_label("XXIIIIII");
  EXPECT_NEAR(std::abs(h.coefficient(boundary)), 0.5 * (1.0 - delta), 1e-14);
  EXPECT_NEAR(std::abs(h.coefficient(inner)), 0.5 * (1.0 + delta), 1e-14);
  EXPECT_NEAR(std::abs(h.coefficient(PauliString::from_label("IXXIIIII"))), 0.5 * (1.0 - delta), 1e-14);
}

TEST(Sshh, SpinDownSectorIsTwistIndependent) {
  const auto p = params(-0.6, 10.0);
  const auto a = build_sshh(p, 0.3);
  const auto b = build_sshh(p, 2.1);
  const std::uint64_t down = 0xF0;
  for (const auto& t : a.terms()) {
    if ((t.string.support() & ~down) == 0) {
      EXPECT_LE(std::abs(t.coeff - b.coefficient(t.string)), 1e-14);
    }
  }
}

TEST(Sshh, FamilyReproducesDirectConstruction) {
  const auto p = params(0.4, 10.0);
  const auto fam = sshh_family(p);
  for (double rho : {0.0, 0.9, 3.3, 5.9}) {
    EXPECT_LE((oracle::sum_matrix(fam.at(rho)) - oracle::sum_matrix(build_sshh(p, rho))).norm(), 1e-12);
  }
}

TEST(Sshh, GapIsTwistIndependentAtZeroU) {
  for (auto [delta, gap] : {std::pair{-0.9, 1.8}, std::pair{-0.5, 1.0}}) {
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k <= 16; ++k) {
      const auto ev = spectrum(build_sshh(params(delta), 2.0 * std::numbers::pi * k / 16));
      const double g = ev[1] - ev[0];
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    EXPECT_LE(hi - lo, 1e-8);
    EXPECT_NEAR(lo, gap, 1e-9);
  }
}

TEST(Pools, HamiltonianPoolCountsAndInclusion) {
  const auto p0 = hamiltonian_pool(params(-0.3));
  const auto p10 = hamiltonian_pool(params(-0.3, 10.0));
  EXPECT_EQ(p0.size(), 18u);
  EXPECT_EQ(p10.size(), 22u);
  EXPECT_EQ(p0.kind, PoolKind::hamiltonian);
  const std::set<std::pair<std::uint64_t, std::uint64_t>> big = [&] {
    std::set<std::pair<std::uint64_t, std::uint64_t>> s;
    for (const auto& e : p10.elements) s.insert({e.x_mask(), e.z_mask()});
    return s;
  }();
  for (const auto& e : p0.elements) EXPECT_TRUE(big.contains({e.x_mask(), e.z_mask()})) << e.label();
}

TEST(Pools, QubitExcitationCounts) {
  EXPECT_EQ(qubit_excitation_pool(8).size(), 616u);
  EXPECT_EQ(qubit_excitation_pool(4).size(), 20u);
  const auto two = qubit_excitation_pool(2);
  ASSERT_EQ(two.size(), 2u);
  std::set<std::string> labels{two.elements[0].label(), two.elements[1].label()};
  EXPECT_EQ(labels, (std::set<std::string>{"XY", "YX"}));
  EXPECT_THROW(qubit_excitation_pool(1), ConfigError);
}

TEST(Pools, ExcitationElementsHaveOddYCount) {
  for (const auto& e : qubit_excitation_pool(6).elements) {
    int y = 0, x = 0;
    for (int q = 0; q < 6; ++q) {
      y += e.letter(q) == 'Y';
      x += e.letter(q) == 'X';
      EXPECT_NE(e.letter(q), 'Z');
    }
    EXPECT_EQ(y % 2, 1);
    EXPECT_TRUE(x + y == 2 || x + y == 4);
  }
}

TEST(Pools, OrderedUniqueAndIdentityFree) {
  for (const auto& pool : {hamiltonian_pool(params(0.6, 10.0)), qubit_excitation_pool(8)}) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      EXPECT_FALSE(pool.elements[i].is_identity());
      if (i > 0) {
        EXPECT_TRUE(pool.elements[i - 1] < pool.elements[i]);
      }
    }
  }
}

TEST(ReferenceState, AlternatingHalfFilling) {
  const auto p = params(-0.3);
  const auto s = reference_state(p);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
  // Up on sites 0 and 2 (qubits 0, 2), down on sites 1 and 3 (qubits 5, 7).
  EXPECT_EQ(std::abs(s[0b10100101]), 1.0);
  EXPECT_NEAR(expectation(number_operator(8), s).real(), 4.0, 1e-14);
}

TEST(ReferenceState, OverlapsGroundStateOnBothSidesOfTheTransition) {
  for (double u : {0.0, 10.0}) {
    for (double delta : {-0.6, -0.3, 0.3, 0.6}) {
      const auto p = params(delta, u);
      const auto g = ground_state(build_sshh(p, 0.0)).ground_state;
      EXPECT_GT(std::norm(inner(g, reference_state(p))), 1e-2) << "delta " << delta << " U " << u;
    }
  }
}
