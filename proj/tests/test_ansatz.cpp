#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "berryloop/ansatz.hpp"
#include "berryloop/errors.hpp"
#include "berryloop/model.hpp"
#include "oracle.hpp"

using namespace berryloop;

namespace {

const cplx I(0.0, 1.0);

using oracle::dense_derivatives;
using oracle::dense_eom;
using oracle::dense_mclachlan;

}  // namespace

TEST(Evaluate, TrivialCases) {
  std::mt19937_64 rng(11);
  const auto ref = oracle::random_state(rng, 3);
  Ansatz empty(ref);
  EXPECT_LE(distance(evaluate(empty), ref), 0.0);
  Ansatz zeros(ref);
  zeros.append(PauliString::from_label("XYZ"), 0.0, Origin::dynamics);
  zeros.append(PauliString::from_label("IZZ"), 0.0, Origin::ground_prep);
  EXPECT_LE(distance(evaluate(zeros), ref), 1e-15);
}

TEST(Evaluate, SingleXUnitClosedForm) {
  Ansatz a(StateVector(3));
  a.append(PauliString::single(3, 0, 'X'), std::numbers::pi / 2, Origin::dynamics);
  StateVector expected = StateVector::basis(3, 1);
  expected *= -I;
  EXPECT_LE(distance(evaluate(a), expected), 1e-15);
}

TEST(Evaluate, UnitOrderMatchesDenseProduct) {
  std::mt19937_64 rng(12);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 7);
  Eigen::VectorXcd v = oracle::vec(a.reference());
  for (const auto& u : a.units()) v = oracle::expm_hermitian(oracle::pauli_matrix(u.generator), u.theta) * v;
  EXPECT_LE((oracle::vec(evaluate(a)) - v).norm(), 1e-12);
}

TEST(Ansatz, RejectsIdentityAndMismatchedGenerators) {
  Ansatz a(StateVector(2));
  EXPECT_THROW(a.append(PauliString::identity(2), 0.1, Origin::dynamics), InvalidGenerator);
  EXPECT_THROW(a.append(PauliString::from_label("XXX"), 0.1, Origin::dynamics), DimensionError);
  EXPECT_THROW(a.set_thetas(std::vector<double>{1.0}), DimensionError);
}

TEST(Derivatives, MatchCentralDifferences) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 5);
    const auto fd = oracle::fd_derivatives(a, 1e-4);
    const auto d = derivative_states(a);
    ASSERT_EQ(d.size(), fd.size());
    for (std::size_t mu = 0; mu < d.size(); ++mu) EXPECT_LE((oracle::vec(d[mu]) - fd[mu]).norm(), 1e-6);
  }
}

TEST(Derivatives, SingleUnitClosedForm) {
  std::mt19937_64 rng(14);
  const auto ref = oracle::random_state(rng, 3);
  const auto p = PauliString::from_label("XZY");
  Ansatz a(ref);
  a.append(p, 0.37, Origin::dynamics);
  StateVector expected = apply_pauli(p, apply_rotation(0.37, p, ref));
  expected *= -I;
  EXPECT_LE(distance(derivative_states(a)[0], expected), 1e-14);
}

TEST(Derivatives, OverlapWithStateIsImaginary) {
  std::mt19937_64 rng(15);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 6);
  const auto psi = evaluate(a);
  for (const auto& d : derivative_states(a)) EXPECT_LE(std::abs(inner(psi, d).real()), 1e-14);
}

TEST(Derivatives, LongAnsatzMatchesDenseProductFormula) {
  // Long enough to span several column tiles of the block computation.
  std::mt19937_64 rng(16);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 5), 45);
  const auto block = compute_derivatives(a);
  EXPECT_LE(distance(block.state(), evaluate(a)), 1e-13);
  const auto dense = dense_derivatives(a);
  ASSERT_EQ(block.n_params(), dense.size());
  for (std::size_t mu = 0; mu < dense.size(); ++mu) {
    EXPECT_LE((oracle::vec(block.derivative(mu)) - dense[mu]).norm(), 1e-12) << "mu " << mu;
  }
}

TEST(Eom, SingleUnitWithZeroMeanGeneratorGivesMTwo) {
  Ansatz a(StateVector(2));
  a.append(PauliString::from_label("XI"), 0.0, Origin::dynamics);
  PauliSum h(2);
  h.add(1.0, PauliString::from_label("ZZ"));
  const auto e = assemble_eom(a, h);
  ASSERT_EQ(e.m.rows(), 1);
  EXPECT_NEAR(e.m(0, 0), 2.0, 1e-14);
}

TEST(Eom, StationaryStateHasZeroV) {
  PauliSum h(3);
  h.add(0.7, PauliString::from_label("ZZI"));
  h.add(-0.4, PauliString::from_label("IZZ"));
  Ansatz a(StateVector::basis(3, 0b101));
  a.append(PauliString::from_label("ZIZ"), 0.3, Origin::dynamics);
  a.append(PauliString::from_label("IZI"), -0.8, Origin::dynamics);
  const auto e = assemble_eom(a, h);
  EXPECT_LE(e.v.norm(), 1e-14);
  EXPECT_LE(e.var_h, 1e-14);
  EXPECT_LE(mclachlan_distance(e, solve_theta_dot(e)), 1e-14);
}

TEST(Eom, RandomInstanceMatchesDenseOracle) {
  std::mt19937_64 rng(17);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 4);
  const auto h = oracle::random_hamiltonian(rng, 4, 10);
  const auto e = assemble_eom(a, h);
  const auto ref = dense_eom(a, h, dense_derivatives(a));
  EXPECT_LE((e.m - ref.m).norm(), 1e-12);
  EXPECT_LE((e.v - ref.v).norm(), 1e-12);
  EXPECT_NEAR(e.energy, ref.energy, 1e-12);
  EXPECT_NEAR(e.var_h, ref.var, 1e-12);
  EXPECT_NEAR(e.base, 2.0 * ref.var, 1e-12);
}

TEST(Eom, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 6);
    const auto h = oracle::random_hamiltonian(rng, 4, 12);
    const auto e = assemble_eom(a, h);
    const auto ref = dense_eom(a, h, oracle::fd_derivatives(a, 1e-4));
    EXPECT_LE((e.m - ref.m).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LE((e.v - ref.v).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Eom, MSymmetricPositiveSemidefinite) {
  std::mt19937_64 rng(19);
  const auto ref = oracle::random_state(rng, 4);
  auto a = oracle::random_ansatz(rng, ref, 12);
  a.append(a.units()[3].generator, 0.2, Origin::dynamics);  // redundant direction
  const auto e = assemble_eom(a, oracle::random_hamiltonian(rng, 4, 8));
  EXPECT_LE((e.m - e.m.transpose()).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.m);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
}

TEST(Solve, DiagonalAndZeroCases) {
  EomSystem e;
  e.m = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  e.v = Eigen::Vector2d(2.0, 4.0);
  const auto x = solve_theta_dot(e);
  EXPECT_NEAR(x(0), 1.0, 1e-5);
  EXPECT_NEAR(x(1), 2.0, 1e-5);
  e.v.setZero();
  EXPECT_EQ(solve_theta_dot(e).norm(), 0.0);
  e.m(0, 1) = std::nan("");
  EXPECT_THROW(solve_theta_dot(e), NumericError);
}

TEST(Solve, SingularMFromDuplicatedUnit) {
  std::mt19937_64 rng(20);
  const auto ref = oracle::random_state(rng, 3);
  Ansatz a(ref);
  const auto p = PauliString::from_label("XYI");
  a.append(p, 0.3, Origin::dynamics);
  a.append(PauliString::from_label("IZX"), 0.1, Origin::dynamics);
  a.append(p, 0.0, Origin::dynamics);
  const auto e = assemble_eom(a, oracle::random_hamiltonian(rng, 3, 6));
  const auto x = solve_theta_dot(e);
  ASSERT_TRUE(x.allFinite());
  EXPECT_LE((e.m * x - e.v).norm(), 1e-4 * e.v.norm());
  // The minimum-norm pseudo-inverse solution reaches the same residual.
  const Eigen::VectorXd pinv = e.m.completeOrthogonalDecomposition().solve(e.v);
  EXPECT_LE((e.m * pinv - e.v).norm(), 1e-4 * e.v.norm());
  EXPECT_LE((x - pinv).norm(), 1e-4 * pinv.norm());
}

TEST(Distance, EmptyAnsatzIsTwiceTheVariance) {
  std::mt19937_64 rng(21);
  const auto h = oracle::random_hamiltonian(rng, 3, 6);
  Ansatz a(oracle::random_state(rng, 3));
  const auto e = assemble_eom(a, h);
  EXPECT_NEAR(mclachlan_distance(e, solve_theta_dot(e)), 2.0 * variance(h, a.reference()), 1e-12);
}

TEST(Distance, OptimizedFormAgreesWithFullQuadratic) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5;) {
    const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 5);
    const auto h = oracle::random_hamiltonian(rng, 4, 10);
    const auto e = assemble_eom(a, h);
    // The unregularized solve needs a well-conditioned M.
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e.m).eigenvalues().minCoeff() < 1e-3) continue;
    ++trial;
    const auto x = solve_theta_dot(e, 0.0);
    const double optimized = mclachlan_distance(e, x);
    EXPECT_NEAR(optimized, mclachlan_quadratic(e, x), 1e-8);
    EXPECT_NEAR(optimized, dense_mclachlan(a, h, dense_derivatives(a), x), 1e-8);
  }
}

TEST(Distance, QuadraticMatchesDenseResidualAtArbitraryVelocity) {
  std::mt19937_64 rng(23);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 6);
  const auto h = oracle::random_hamiltonian(rng, 4, 10);
  const auto e = assemble_eom(a, h);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(6);
  for (auto& c : x) c = g(rng);
  EXPECT_NEAR(mclachlan_quadratic(e, x), dense_mclachlan(a, h, dense_derivatives(a), x), 1e-10);
}

TEST(Distance, CandidateScreeningMatchesExplicitAppend) {
  std::mt19937_64 rng(24);
  const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 5);
  const auto h = oracle::random_hamiltonian(rng, 4, 10);
  const auto k = analyze(a, h);
  const auto e = assemble(k, Flow::real_time);
  const RegularizedSolver solver(e.m, kDefaultRegularization);
  const auto x = solver.solve(e.v);
  const double l2 = mclachlan_distance(e, x);
  for (int c = 0; c < 10; ++c) {
    const auto p = oracle::random_string(rng, 4);
    Ansatz b = a;
    b.append(p, 0.0, Origin::dynamics);
    const auto eb = assemble_eom(b, h);
    const double explicit_l2 = mclachlan_distance(eb, solve_theta_dot(eb));
    EXPECT_NEAR(distance_with_candidate(k, e, solver, x, l2, p), explicit_l2, 1e-9) << p.label();
  }
}

TEST(Distance, ZeroAngleAppendKeepsStateAndNeverRaisesDistance) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = oracle::random_ansatz(rng, oracle::random_state(rng, 4), 4);
    const auto h = oracle::random_hamiltonian(rng, 4, 8);
    Ansatz b = a;
    b.append(oracle::random_string(rng, 4), 0.0, Origin::dynamics);
    EXPECT_LE(distance(evaluate(a), evaluate(b)), 1e-15);
    const auto ea = assemble_eom(a, h);
    const auto eb = assemble_eom(b, h);
    EXPECT_LE(mclachlan_distance(eb, solve_theta_dot(eb)), mclachlan_distance(ea, solve_theta_dot(ea)) + 1e-12);
  }
}

TEST(Resources, Layering) {
  Ansatz empty(StateVector(5));
  EXPECT_EQ(resource_metrics(empty).cnot, 0);
  EXPECT_EQ(resource_metrics(empty).depth, 0);

  Ansatz disjoint(StateVector(5));
  disjoint.append(PauliString::from_label("XXIII"), 0.1, Origin::dynamics);
  disjoint.append(PauliString::from_label("IIXXI"), 0.1, Origin::dynamics);
  EXPECT_EQ(resource_metrics(disjoint).depth, 1);

  Ansatz chain(StateVector(5));
  chain.append(PauliString::from_label("XXIII"), 0.1, Origin::dynamics);
  chain.append(PauliString::from_label("IXXII"), 0.1, Origin::dynamics);
  chain.append(PauliString::from_label("IIIXX"), 0.1, Origin::dynamics);
  EXPECT_EQ(resource_metrics(chain).cnot, 6);
  EXPECT_EQ(resource_metrics(chain).depth, 2);
  EXPECT_EQ(chain.layer_of(2), 0);
  EXPECT_EQ(chain.layer_of(1), 1);
}

TEST(Resources, DepthBoundedByUnitCountAndLayersDisjoint) {
  std::mt19937_64 rng(26);
  const auto a = oracle::random_ansatz(rng, StateVector(6), 30);
  const auto r = resource_metrics(a);
  EXPECT_LE(static_cast<std::size_t>(r.depth), a.size());
  int cnot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cnot += cnot_cost(a.units()[i].generator);
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a.layer_of(i) == a.layer_of(j)) {
        EXPECT_EQ(a.units()[i].generator.support() & a.units()[j].generator.support(), 0u);
      }
    }
  }
  EXPECT_EQ(r.cnot, cnot);
}
