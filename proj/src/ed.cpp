#include "berryloop/ed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "berryloop/avqds.hpp"
#include "berryloop/berry.hpp"
#include "berryloop/errors.hpp"

namespace berryloop {

Eigen::MatrixXcd dense_matrix(const PauliSum& h, int cap) {
  if (h.n_qubits() > cap) {
    throw DimensionError("dense_matrix: " + std::to_string(h.n_qubits()) + " qubits exceed the dense cap of " +
                         std::to_string(cap));
  }
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim) * h.identity_offset();
  std::vector<cplx> col(static_cast<std::size_t>(dim));
  for (const auto& t : h.terms()) {
    // P|k> = phase |k ^ x>
    for (Eigen::Index k = 0; k < dim; ++k) {
      std::fill(col.begin(), col.end(), cplx{0.0, 0.0});
      col[static_cast<std::size_t>(k)] = 1.0;
      kernels::apply_pauli(t.string, col);
      const auto target = static_cast<Eigen::Index>(static_cast<std::uint64_t>(k) ^ t.string.x_mask());
      m(target, k) += t.coeff * col[static_cast<std::size_t>(target)];
    }
  }
  return m;
}

BlockStructure BlockStructure::from_matrices(const std::vector<Eigen::MatrixXcd>& matrices, double tol) {
  if (matrices.empty()) throw ContractError("BlockStructure: no matrices");
  const auto dim = matrices.front().rows();
  std::vector<std::uint32_t> parent(static_cast<std::size_t>(dim));
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (const auto& m : matrices) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = c + 1; r < dim; ++r) {
        if (std::abs(m(r, c)) > tol || std::abs(m(c, r)) > tol) {
          const auto a = find(static_cast<std::uint32_t>(r));
          const auto b = find(static_cast<std::uint32_t>(c));
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  BlockStructure out;
  std::vector<int> slot(static_cast<std::size_t>(dim), -1);
  for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(dim); ++k) {
    const auto root = find(k);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.blocks.size());
      out.blocks.emplace_back();
    }
    out.blocks[static_cast<std::size_t>(slot[root])].push_back(k);
  }
  return out;
}

namespace {

Eigen::MatrixXcd restrict_to(const Eigen::MatrixXcd& m, const std::vector<std::uint32_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

const double kGaussLow = 0.5 - std::sqrt(3.0) / 6.0;
const double kGaussHigh = 0.5 + std::sqrt(3.0) / 6.0;
const double kCfMajor = 0.25 + std::sqrt(3.0) / 6.0;
const double kCfMinor = 0.25 - std::sqrt(3.0) / 6.0;

void fix_gauge(StateVector& s) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t k = 0; k < s.dim(); ++k) {
    const double a = std::abs(s[k]);
    if (a > best_abs + 1e-12) {
      best_abs = a;
      best = k;
    }
  }
  s *= std::conj(s[best]) / best_abs;
}

// exp(-i tau H) v for a small dense Hermitian block, Taylor-summed to round-off.
void taylor_exp_apply(const Eigen::MatrixXcd& h, double tau, Eigen::VectorXcd& v) {
  Eigen::VectorXcd term = v;
  Eigen::VectorXcd acc = v;
  const cplx factor{0.0, -tau};
  const double scale = v.norm();
  for (int k = 1; k < 60; ++k) {
    term = (factor / static_cast<double>(k)) * (h * term);
    acc += term;
    if (term.norm() <= 1e-17 * scale) break;
  }
  v = acc;
}

}  // namespace

EdReport ground_state(const PauliSum& h, int cap) {
  const Eigen::MatrixXcd m = dense_matrix(h, cap);
  const BlockStructure bs = BlockStructure::from_matrices({m});

  EdReport rep;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_vec;
  const std::vector<std::uint32_t>* best_block = nullptr;
  for (const auto& block : bs.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(restrict_to(m, block));
    if (es.info() != Eigen::Success) throw NumericError("ground_state: eigensolver failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rep.spectrum.push_back(es.eigenvalues()(i));
    if (es.eigenvalues()(0) < best) {
      best = es.eigenvalues()(0);
      best_vec = es.eigenvectors().col(0);
      best_block = &block;
    }
  }
  std::sort(rep.spectrum.begin(), rep.spectrum.end());
  rep.ground_energy = rep.spectrum.front();
  rep.gap = rep.spectrum.size() > 1 ? rep.spectrum[1] - rep.spectrum[0] : 0.0;
  rep.degenerate = rep.gap < kDegeneracyTolerance;

  std::vector<cplx> amp(std::size_t{1} << h.n_qubits(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < best_block->size(); ++i) amp[(*best_block)[i]] = best_vec(static_cast<Eigen::Index>(i));
  rep.ground_state = StateVector(h.n_qubits(), std::move(amp));
  rep.ground_state.normalize();
  fix_gauge(rep.ground_state);
  return rep;
}

EdTrajectory ed_propagate(const StateVector& s, const LoopSchedule& schedule, const TwistFamily& family,
                          const EdPropagateOptions& options) {
  if (!(options.dt > 0.0)) throw ConfigError("ed_propagate: dt must be positive");
  if (!(schedule.period > 0.0)) throw ConfigError("ed_propagate: loop period must be positive");
  const int nq = family.n_qubits();
  if (s.n_qubits() != nq) throw DimensionError("ed_propagate: state and Hamiltonian qubit counts differ");

  const Eigen::MatrixXcd m_const = dense_matrix(family.constant);
  const Eigen::MatrixXcd m_cos = dense_matrix(family.cos_part);
  const Eigen::MatrixXcd m_sin = dense_matrix(family.sin_part);
  const BlockStructure bs = BlockStructure::from_matrices({m_const, m_cos, m_sin});

  struct Block {
    const std::vector<std::uint32_t>* idx;
    Eigen::MatrixXcd a, b, c;
    Eigen::VectorXcd v;
  };
  std::vector<Block> blocks;
  for (const auto& idx : bs.blocks) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(idx.size()));
    double w = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = s[idx[i]];
      w += std::norm(s[idx[i]]);
    }
    if (w == 0.0) continue;
    blocks.push_back({&idx, restrict_to(m_const, idx), restrict_to(m_cos, idx), restrict_to(m_sin, idx), v});
  }

  auto assemble_state = [&]() {
    std::vector<cplx> amp(s.dim(), cplx{0.0, 0.0});
    for (const auto& b : blocks)
      for (std::size_t i = 0; i < b.idx->size(); ++i) amp[(*b.idx)[i]] = b.v(static_cast<Eigen::Index>(i));
    return StateVector(nq, std::move(amp));
  };

  EdTrajectory out;
  const double period = schedule.period;
  const double eps = 1e-12 * period;
  std::vector<double> stops = options.checkpoints;
  stops.push_back(schedule.boundary());
  stops.push_back(period);
  std::sort(stops.begin(), stops.end());
  std::size_t next_checkpoint = 0;
  const auto& cps = options.checkpoints;
  const double initial_norm = s.norm();

  auto record_due = [&](double clock) {
    while (next_checkpoint < cps.size() && cps[next_checkpoint] <= clock + eps) {
      out.clock.push_back(cps[next_checkpoint]);
      out.states.push_back(assemble_state());
      ++next_checkpoint;
    }
  };

  double clock = 0.0;
  record_due(clock);
  std::size_t stop_idx = 0;
  while (clock < period - eps) {
    while (stop_idx < stops.size() && stops[stop_idx] <= clock + eps) ++stop_idx;
    const double target = stop_idx < stops.size() ? stops[stop_idx] : period;
    double step = options.dt;
    double next = clock + step;
    if (next >= target - eps) {
      next = target;
      step = next - clock;
    }
    const Half half = schedule.half_at(clock + 0.5 * step);
    const double dt = schedule.sign(half) * step;
    double energy_start = 0.0, energy_end = 0.0;
    const double c0 = std::cos(schedule.rho_at(clock)), s0 = std::sin(schedule.rho_at(clock));
    const double c1 = std::cos(schedule.rho_at(next)), s1 = std::sin(schedule.rho_at(next));
    for (auto& b : blocks) {
      energy_start += b.v.dot((b.a + c0 * b.b + s0 * b.c) * b.v).real();
      if (options.scheme == EdScheme::magnus4) {
        const double r1 = schedule.rho_at(clock + kGaussLow * step);
        const double r2 = schedule.rho_at(clock + kGaussHigh * step);
        const Eigen::MatrixXcd h1 = b.a + std::cos(r1) * b.b + std::sin(r1) * b.c;
        const Eigen::MatrixXcd h2 = b.a + std::cos(r2) * b.b + std::sin(r2) * b.c;
        // The factor applied first weights the earlier node.
        taylor_exp_apply(kCfMajor * h1 + kCfMinor * h2, dt, b.v);
        taylor_exp_apply(kCfMinor * h1 + kCfMajor * h2, dt, b.v);
      } else {
        const double rho = options.scheme == EdScheme::endpoint ? schedule.rho_at(next)
                                                                : schedule.rho_at(clock + 0.5 * step);
        taylor_exp_apply(b.a + std::cos(rho) * b.b + std::sin(rho) * b.c, dt, b.v);
      }
      energy_end += b.v.dot((b.a + c1 * b.b + s1 * b.c) * b.v).real();
    }
    const double increment = -0.5 * (energy_start + energy_end) * dt;
    if (half == Half::forward) {
      out.phi_g1_forward += increment;
    } else {
      out.phi_g1_backward += increment;
    }
    clock = next;
    ++out.steps;
    record_due(clock);
  }

  double norm2 = 0.0;
  for (const auto& b : blocks) norm2 += b.v.squaredNorm();
  out.max_norm_drift = std::abs(std::sqrt(norm2) - initial_norm);
  return out;
}

double wilson_loop_phase(const std::vector<StateVector>& loop) {
  if (loop.size() < 2) throw ContractError("wilson_loop_phase: need at least two states");
  cplx prod{1.0, 0.0};
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const cplx link = inner(loop[j], loop[(j + 1) % loop.size()]);
    if (std::abs(link) < 1e-6) throw NumericError("wilson_loop_phase: vanishing link overlap, grid too coarse");
    prod *= link / std::abs(link);
  }
  // The adiabatic phase is i times the loop integral of <G|dG>, i.e. minus arg of the link product.
  return -std::arg(prod);
}

double wilson_loop_berry(const ModelParams& params, int n_grid) {
  if (n_grid < 16) throw ConfigError("wilson_loop_berry: n_grid must be at least 16");
  const TwistFamily family = sshh_family(params);
  std::vector<StateVector> loop;
  loop.reserve(static_cast<std::size_t>(n_grid));
  for (int j = 0; j < n_grid; ++j) {
    const double rho = 2.0 * std::numbers::pi * j / n_grid;
    const EdReport rep = ground_state(family.at(rho));
    if (rep.degenerate) throw NumericError("wilson_loop_berry: degenerate ground state on the loop");
    loop.push_back(rep.ground_state);
  }
  return principal_value(wilson_loop_phase(loop));
}

double infidelity(const StateVector& a, const StateVector& b) {
  return std::max(0.0, 1.0 - std::norm(inner(a, b)));
}

InfidelityReport infidelities(TrajectoryRecord& traj, const TwistFamily& family, const LoopSchedule& schedule,
                              const EdPropagateOptions& options) {
  if (traj.snapshots.size() != traj.points.size()) {
    throw ContractError("infidelities: trajectory was recorded without statevector snapshots");
  }
  InfidelityReport rep;
  if (traj.points.empty()) return rep;

  EdPropagateOptions opt = options;
  opt.checkpoints.clear();
  for (const auto& p : traj.points) opt.checkpoints.push_back(p.clock);
  const StateVector start = ground_state(family.at(schedule.rho_at(0.0))).ground_state;
  const EdTrajectory exact = ed_propagate(start, schedule, family, opt);
  if (exact.states.size() != traj.points.size()) throw NumericError("infidelities: checkpoint bookkeeping mismatch");

  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const StateVector g = ground_state(family.at(traj.points[i].rho)).ground_state;
    const double f = infidelity(traj.snapshots[i], g);
    const double ft = infidelity(traj.snapshots[i], exact.states[i]);
    traj.points[i].infid_f = f;
    traj.points[i].infid_ft = ft;
    rep.infid_f.push_back(f);
    rep.infid_ft.push_back(ft);
    rep.max_infid_f = std::max(rep.max_infid_f, f);
    rep.max_infid_ft = std::max(rep.max_infid_ft, ft);
  }
  return rep;
}

AdiabaticProfile ed_adiabatic_profile(const TwistFamily& family, const LoopSchedule& schedule, int n_samples,
                                      const EdPropagateOptions& options) {
  if (n_samples < 1) throw ContractError("ed_adiabatic_profile: need at least one sample interval");
  EdPropagateOptions opt = options;
  opt.checkpoints.clear();
  for (int i = 0; i <= n_samples; ++i) opt.checkpoints.push_back(schedule.period * i / n_samples);
  const StateVector start = ground_state(family.at(schedule.rho_at(0.0))).ground_state;
  const EdTrajectory exact = ed_propagate(start, schedule, family, opt);
  if (exact.states.size() != opt.checkpoints.size()) {
    throw NumericError("ed_adiabatic_profile: checkpoint bookkeeping mismatch");
  }
  AdiabaticProfile out;
  for (std::size_t i = 0; i < exact.states.size(); ++i) {
    const double rho = schedule.rho_at(opt.checkpoints[i]);
    const double f = infidelity(exact.states[i], ground_state(family.at(rho)).ground_state);
    out.rho.push_back(rho);
    out.infid.push_back(f);
    out.max_infid = std::max(out.max_infid, f);
  }
  return out;
}

}  // namespace berryloop
