#include "berryloop/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "berryloop/errors.hpp"
#include "berryloop/resources.hpp"

namespace berryloop {

using nlohmann::json;

namespace {

const std::set<std::string> kAxes{"delta", "T", "dt_max", "fixed_dt", "l2_cut"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (!(protocol.period > 0.0)) throw ConfigError("config: T must be positive");
  dyn_config().validate();
  it_config().validate();
  if (sweep) {
    if (!kAxes.contains(sweep->parameter)) throw ConfigError("config: unknown sweep axis '" + sweep->parameter + "'");
    for (const double v : sweep->values) at_sweep_value(v).validate();
  }
}

ItConfig RunConfig::it_config() const {
  ItConfig c;
  c.dtau = ground_prep.dtau;
  c.l2_cut_it = ground_prep.l2_cut_it;
  c.max_steps = ground_prep.max_steps;
  c.energy_tol = ground_prep.energy_tol;
  c.lambda_reg = protocol.lambda_reg;
  return c;
}

DynConfig RunConfig::dyn_config() const {
  DynConfig c;
  c.l2_cut = protocol.l2_cut;
  c.dtheta_max = protocol.dtheta_max;
  c.dt_max = protocol.dt_max;
  c.fixed_dt = protocol.fixed_dt;
  c.lambda_reg = protocol.lambda_reg;
  return c;
}

RunConfig RunConfig::at_sweep_value(double value) const {
  if (!sweep) throw ContractError("RunConfig::at_sweep_value: no sweep configured");
  RunConfig c = *this;
  const std::string& p = sweep->parameter;
  if (p == "delta") {
    c.model.delta = value;
  } else if (p == "T") {
    c.protocol.period = value;
  } else if (p == "dt_max") {
    c.protocol.dt_max = value;
  } else if (p == "fixed_dt") {
    c.protocol.fixed_dt = value;
  } else if (p == "l2_cut") {
    c.protocol.l2_cut = value;
  } else {
    throw ConfigError("config: unknown sweep axis '" + p + "'");
  }
  c.sweep.reset();
  return c;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return model == o.model && protocol == o.protocol && ground_prep == o.ground_prep && sweep == o.sweep &&
         output == o.output && infidelities == o.infidelities;
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"sites", c.model.n_sites}, {"hopping", c.model.hopping}, {"delta", c.model.delta}, {"u", c.model.u}};
  j["protocol"] = {{"T", c.protocol.period},           {"l2_cut", c.protocol.l2_cut},
                   {"dtheta_max", c.protocol.dtheta_max}, {"dt_max", c.protocol.dt_max},
                   {"fixed_dt", c.protocol.fixed_dt},   {"lambda_reg", c.protocol.lambda_reg}};
  j["ground_prep"] = {{"dtau", c.ground_prep.dtau},
                      {"l2_cut_it", c.ground_prep.l2_cut_it},
                      {"max_steps", c.ground_prep.max_steps},
                      {"energy_tol", c.ground_prep.energy_tol}};
  j["sweep"] = c.sweep ? json{{"parameter", c.sweep->parameter}, {"values", c.sweep->values}} : json(nullptr);
  j["output"] = {{"directory", c.output.directory}, {"csv", c.output.csv}, {"json", c.output.json}};
  j["infidelities"] = c.infidelities;
  return j;
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j, {"model", "protocol", "ground_prep", "sweep", "output", "infidelities"}, "config");
  RunConfig c;
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, {"sites", "hopping", "delta", "u"}, "model");
    read(m, "sites", c.model.n_sites);
    read(m, "hopping", c.model.hopping);
    read(m, "delta", c.model.delta);
    read(m, "u", c.model.u);
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    reject_unknown(p, {"T", "l2_cut", "dtheta_max", "dt_max", "fixed_dt", "lambda_reg"}, "protocol");
    read(p, "T", c.protocol.period);
    read(p, "l2_cut", c.protocol.l2_cut);
    read(p, "dtheta_max", c.protocol.dtheta_max);
    read(p, "dt_max", c.protocol.dt_max);
    read(p, "fixed_dt", c.protocol.fixed_dt);
    read(p, "lambda_reg", c.protocol.lambda_reg);
  }
  if (j.contains("ground_prep")) {
    const json& g = j.at("ground_prep");
    reject_unknown(g, {"dtau", "l2_cut_it", "max_steps", "energy_tol"}, "ground_prep");
    read(g, "dtau", c.ground_prep.dtau);
    read(g, "l2_cut_it", c.ground_prep.l2_cut_it);
    read(g, "max_steps", c.ground_prep.max_steps);
    read(g, "energy_tol", c.ground_prep.energy_tol);
  }
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"parameter", "values"}, "sweep");
    SweepAxis axis;
    read(s, "parameter", axis.parameter);
    read(s, "values", axis.values);
    c.sweep = axis;
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"directory", "csv", "json"}, "output");
    read(o, "directory", c.output.directory);
    read(o, "csv", c.output.csv);
    read(o, "json", c.output.json);
  }
  read(j, "infidelities", c.infidelities);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
}

json to_json(const BerryResult& r) {
  const SymmetryReport sym = symmetry_report(r.trajectory, r.period);
  json j;
  j["T"] = r.period;
  j["p0"] = r.readout.p0;
  j["phi_qc"] = r.readout.phi_qc;
  j["overlap_abs"] = r.readout.magnitude;
  j["phi_g1"] = r.phi_g1;
  j["phi_g2"] = r.phi_g2;
  j["phi_g"] = r.phi_g;
  j["phi_b"] = r.phi_b;
  j["phi_b_principal"] = r.phi_b_principal;
  j["ground_prep"] = {{"energy", r.ground.energy},
                      {"variance", r.ground.variance},
                      {"steps", r.ground.steps},
                      {"converged", r.ground.converged},
                      {"infidelity", number_or_null(r.ground.infidelity)},
                      {"n_units", r.ground.n_units},
                      {"cnot", r.initial_resources.cnot},
                      {"depth", r.initial_resources.depth}};
  j["final_resources"] = {{"cnot", r.final_resources.cnot}, {"depth", r.final_resources.depth}};
  j["loop"] = {{"steps", r.trajectory.points.empty() ? 0 : r.trajectory.points.size() - 1},
               {"max_l2", r.trajectory.max_l2},
               {"saturated", r.trajectory.saturated},
               {"growth_iterations", r.trajectory.growth.size()}};
  j["half_cycles"] = {{"phi_g1_forward", sym.phi_g1_forward},   {"phi_g1_backward", sym.phi_g1_backward},
                      {"phi_g2_forward", sym.phi_g2_forward},   {"phi_g2_backward", sym.phi_g2_backward},
                      {"units_first_half", sym.units_first_half}, {"units_second_half", sym.units_second_half}};
  if (!r.infidelity.infid_f.empty()) {
    j["max_infid_f"] = r.infidelity.max_infid_f;
    j["max_infid_ft"] = r.infidelity.max_infid_ft;
  } else {
    j["max_infid_f"] = nullptr;
    j["max_infid_ft"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const TrajectoryRecord& traj) {
  std::string out = std::string("# ") + kFormatTag + "\n";
  out += "step,t,rho,energy,l2,n_theta,cnot,depth,phi_g1,phi_g2,infid_f,infid_ft\n";
  for (const auto& p : traj.points) {
    out += std::to_string(p.step) + ',' + format_double(p.t) + ',' + format_double(p.rho) + ',' +
           format_double(p.energy) + ',' + format_double(p.l2) + ',' + std::to_string(p.n_theta) + ',' +
           std::to_string(p.cnot) + ',' + std::to_string(p.depth) + ',' + format_double(p.phi_g1) + ',' +
           format_double(p.phi_g2) + ',' + format_double(p.infid_f) + ',' + format_double(p.infid_ft) + '\n';
  }
  return out;
}

SummaryRow summary_row(double axis_value, const BerryResult& r) {
  SummaryRow row;
  row.axis_value = axis_value;
  row.phi_b_principal = r.phi_b_principal;
  row.max_infid_f = r.infidelity.infid_f.empty() ? std::nan("") : r.infidelity.max_infid_f;
  const ResourceTrace tr = trace_from_trajectory(r.trajectory);
  row.max_cnot = tr.max_cnot();
  row.max_depth = tr.max_depth();
  return row;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string("# ") + kFormatTag + "\n";
  out += "axis_value,phi_b_principal,max_infid_f,max_cnot,max_depth\n";
  for (const auto& r : rows) {
    out += format_double(r.axis_value) + ',' + format_double(r.phi_b_principal) + ',' + format_double(r.max_infid_f) +
           ',' + std::to_string(r.max_cnot) + ',' + std::to_string(r.max_depth) + '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const BerryResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  if (cfg.output.csv) write_text(dir / "trajectory.csv", trajectory_csv(r.trajectory));
  if (cfg.output.json) {
    json j;
    j["format"] = kFormatTag;
    j["config"] = to_json(cfg);
    j["result"] = to_json(r);
    write_text(dir / "result.json", j.dump(2) + "\n");
  }
}

void write_summary(const std::filesystem::path& dir, const std::vector<SummaryRow>& rows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "summary.csv", summary_csv(rows));
}

}  // namespace berryloop
