#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <numbers>
#include <thread>

#include "CLI11.hpp"

#include "berryloop/berry.hpp"
#include "berryloop/ed.hpp"
#include "berryloop/errors.hpp"
#include "berryloop/io.hpp"

using namespace berryloop;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFlagged = 3;

struct ModelFlags {
  int sites = 4;
  double hopping = 1.0;
  double delta = -0.3;
  double u = 0.0;
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--sites", m.sites, "Number of lattice sites (even)")->capture_default_str();
  app->add_option("--t", m.hopping, "Hopping amplitude")->capture_default_str();
  app->add_option("--delta", m.delta, "Dimerization")->capture_default_str();
  app->add_option("--u", m.u, "On-site interaction")->capture_default_str();
}

struct RunFlags {
  std::string config_path;
  double period = 0.0;
  double l2_cut = 0.0;
  double dtheta_max = 0.0;
  double dt_max = 0.0;
  double fixed_dt = 0.0;
  std::string out;
  bool infidelities = false;
  bool strict = false;
};

void add_run_flags(CLI::App* app, RunFlags& r) {
  app->add_option("--config", r.config_path, "JSON run configuration; flags override it");
  app->add_option("--T", r.period, "Loop period");
  app->add_option("--l2-cut", r.l2_cut, "McLachlan distance threshold for growth");
  app->add_option("--dtheta-max", r.dtheta_max, "Largest parameter change per step");
  app->add_option("--dt-max", r.dt_max, "Cap on the adaptive step");
  app->add_option("--fixed-dt", r.fixed_dt, "Constant step instead of the adaptive rule");
  app->add_option("--out", r.out, "Output directory");
  app->add_flag("--infidelities", r.infidelities, "Compare against exact propagation and ground states");
  app->add_flag("--strict", r.strict, "Exit with code 3 when a result carries warnings");
}

RunConfig resolve(CLI::App* app, const ModelFlags& m, const RunFlags& r) {
  RunConfig c = r.config_path.empty() ? RunConfig{} : load_config(r.config_path);
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (r.config_path.empty() || given("--sites")) c.model.n_sites = m.sites;
  if (r.config_path.empty() || given("--t")) c.model.hopping = m.hopping;
  if (r.config_path.empty() || given("--delta")) c.model.delta = m.delta;
  if (r.config_path.empty() || given("--u")) c.model.u = m.u;
  if (given("--T")) c.protocol.period = r.period;
  if (given("--l2-cut")) c.protocol.l2_cut = r.l2_cut;
  if (given("--dtheta-max")) c.protocol.dtheta_max = r.dtheta_max;
  if (given("--dt-max")) c.protocol.dt_max = r.dt_max;
  if (given("--fixed-dt")) c.protocol.fixed_dt = r.fixed_dt;
  if (given("--out")) c.output.directory = r.out;
  if (r.infidelities) c.infidelities = true;
  return c;
}

BerryResult run_one(const RunConfig& c) {
  BerryOptions opt;
  opt.compute_infidelities = c.infidelities;
  return run_berry(c.model, c.protocol.period, c.it_config(), c.dyn_config(), opt);
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BERRYLOOP_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v < 1) throw ConfigError("BERRYLOOP_THREADS must be a positive integer");
      n = static_cast<unsigned>(v);
    } catch (const std::logic_error&) {
      throw ConfigError("BERRYLOOP_THREADS must be a positive integer");
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_pools(const ModelFlags& m, bool list) {
  ModelParams p{m.sites, m.hopping, m.delta, m.u};
  p.validate();
  const OperatorPool ham = hamiltonian_pool(p);
  const OperatorPool exc = qubit_excitation_pool(p.n_qubits());
  std::cout << "hamiltonian pool size " << ham.size() << '\n';
  if (list)
    for (const auto& s : ham.elements) std::cout << "  " << s.label() << '\n';
  std::cout << "excitation pool size " << exc.size() << '\n';
  if (list)
    for (const auto& s : exc.elements) std::cout << "  " << s.label() << '\n';
  return 0;
}

int cmd_ed_berry(const ModelFlags& m, int grid) {
  const ModelParams p{m.sites, m.hopping, m.delta, m.u};
  const double phi = wilson_loop_berry(p, grid);
  const EdReport rep = ground_state(build_sshh(p, 0.0));
  std::cout << "phi_b_principal " << format_double(phi) << '\n';
  std::cout << "phi_b_over_pi " << format_double(phi / std::numbers::pi) << '\n';
  std::cout << "ground_energy " << format_double(rep.ground_energy) << '\n';
  std::cout << "gap " << format_double(rep.gap) << '\n';
  return 0;
}

int cmd_ground(const RunConfig& c, bool strict) {
  c.validate();
  const ItConfig it = with_default_pool(c.it_config(), c.model);
  const PauliSum h = build_sshh(c.model, 0.0);
  auto [ansatz, rep] = avqite_run(h, reference_state(c.model), it);
  const EdReport ed = ground_state(h);
  rep.infidelity = infidelity(evaluate(ansatz), ed.ground_state);
  nlohmann::json j{{"energy", rep.energy},
                   {"ed_energy", ed.ground_energy},
                   {"variance", rep.variance},
                   {"infidelity", rep.infidelity},
                   {"steps", rep.steps},
                   {"converged", rep.converged},
                   {"n_units", rep.n_units},
                   {"cnot", rep.resources.cnot},
                   {"depth", rep.resources.depth}};
  print_json(j);
  return (strict && (!rep.converged || rep.saturated)) ? kExitFlagged : 0;
}

int cmd_loop(const RunConfig& c, bool strict) {
  c.validate();
  if (c.sweep) throw ConfigError("loop: the configuration describes a sweep; use the sweep subcommand");
  const BerryResult r = run_one(c);
  if (!c.output.directory.empty()) write_run(c.output.directory, c, r);
  print_json(to_json(r));
  return (strict && !r.warnings.empty()) ? kExitFlagged : 0;
}

int cmd_sweep(RunConfig c, const std::string& axis, const std::vector<double>& values, bool strict) {
  if (!axis.empty()) c.sweep = SweepAxis{axis, values};
  if (!c.sweep) throw ConfigError("sweep: no axis given (use --axis/--values or a config with a sweep block)");
  c.validate();
  const auto& vals = c.sweep->values;
  std::vector<std::optional<BerryResult>> results(vals.size());
  std::vector<std::exception_ptr> errors(vals.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < vals.size(); i = next++) {
      try {
        results[i] = run_one(c.at_sweep_value(vals[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers = worker_count(vals.size());
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SummaryRow> rows;
  bool flagged = false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    rows.push_back(summary_row(vals[i], *results[i]));
    flagged = flagged || !results[i]->warnings.empty();
    if (!c.output.directory.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu", i);
      write_run(std::filesystem::path(c.output.directory) / name, c.at_sweep_value(vals[i]), *results[i]);
    }
  }
  if (!c.output.directory.empty()) write_summary(c.output.directory, rows);
  std::cout << summary_csv(rows);
  return (strict && flagged) ? kExitFlagged : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berry phases of the dimerized Hubbard ring by adaptive variational loops"};
  app.require_subcommand(1);

  ModelFlags model;
  RunFlags run;

  auto* pools = app.add_subcommand("pools", "Print operator pool sizes");
  add_model_flags(pools, model);
  bool list = false;
  pools->add_flag("--list", list, "Print every pool element");

  auto* ed = app.add_subcommand("ed-berry", "Exact Wilson-loop Berry phase");
  add_model_flags(ed, model);
  int grid = 256;
  ed->add_option("--grid", grid, "Number of twist-angle grid points")->capture_default_str();

  auto* ground = app.add_subcommand("ground", "Adaptive imaginary-time ground-state preparation at zero twist");
  add_model_flags(ground, model);
  add_run_flags(ground, run);

  auto* loop = app.add_subcommand("loop", "One full Berry-phase loop");
  add_model_flags(loop, model);
  add_run_flags(loop, run);

  auto* sweep = app.add_subcommand("sweep", "Loop runs over one parameter axis");
  add_model_flags(sweep, model);
  add_run_flags(sweep, run);
  std::string axis;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "delta | T | dt_max | fixed_dt | l2_cut");
  sweep->add_option("--values", values, "Axis values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*pools) return cmd_pools(model, list);
    if (*ed) return cmd_ed_berry(model, grid);
    if (*ground) return cmd_ground(resolve(ground, model, run), run.strict);
    if (*loop) return cmd_loop(resolve(loop, model, run), run.strict);
    if (*sweep) return cmd_sweep(resolve(sweep, model, run), axis, values, run.strict);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
