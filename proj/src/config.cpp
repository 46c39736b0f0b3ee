#include "nscheps/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nscheps {

using json = nlohmann::ordered_json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration";
  for (const auto& s : issues) out += "\n  " + s;
  return out;
}

class Reader {
 public:
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& what) { issues.push_back(path + ": " + what); }

  // Returns false (and records the problem) if j is not an object or has keys outside `allowed`.
  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path.empty() ? "<root>" : path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(child(path, key), "unknown key");
    }
    return true;
  }

  static std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) return fail(child(path, key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(child(path, key), "must be finite");
  }

  void integer(const json& obj, const std::string& path, const char* key, int& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) return fail(child(path, key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      return fail(child(path, key), "integer out of range");
    out = static_cast<int>(x);
  }

  void string(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) return fail(child(path, key), "expected a string");
    out = v.get<std::string>();
  }

  void number_list(const json& obj, const std::string& path, const char* key, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = child(path, key);
    if (!v.is_array() || v.empty()) return fail(p, "expected a non-empty array of numbers");
    std::vector<double> list;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) return fail(p + "[" + std::to_string(i) + "]", "expected a number");
      list.push_back(v[i].get<double>());
    }
    out = std::move(list);
  }
};

void read_grid(Reader& r, const json& j, GridSpec& g) {
  if (!r.object(j, "grid", {"nx", "ny", "lx", "ly"})) return;
  r.integer(j, "grid", "nx", g.nx);
  r.integer(j, "grid", "ny", g.ny);
  r.number(j, "grid", "lx", g.lx);
  r.number(j, "grid", "ly", g.ly);
  if (g.nx < 4) r.fail("grid.nx", "must be >= 4");
  if (g.ny < 4) r.fail("grid.ny", "must be >= 4");
  if (!(g.lx > 0.0)) r.fail("grid.lx", "must be > 0");
  if (!(g.ly > 0.0)) r.fail("grid.ly", "must be > 0");
  if (g.nx >= 4 && g.ny >= 4 && g.lx > 0.0 && g.ly > 0.0) {
    const double hx = g.lx / g.nx;
    const double hy = g.ly / g.ny;
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) r.fail("grid", "cells must be square (lx/nx = ly/ny)");
  }
}

void read_params(Reader& r, const json& j, PhysicalParams& p) {
  if (!r.object(j, "params", {"rho1", "rho2", "theta", "theta_c", "nu1", "nu2", "m0", "mobility_model"})) return;
  r.number(j, "params", "rho1", p.rho1);
  r.number(j, "params", "rho2", p.rho2);
  r.number(j, "params", "theta", p.theta);
  r.number(j, "params", "theta_c", p.theta_c);
  r.number(j, "params", "nu1", p.nu1);
  r.number(j, "params", "nu2", p.nu2);
  r.number(j, "params", "m0", p.m0);
  if (j.contains("mobility_model")) {
    const json& m = j.at("mobility_model");
    if (m.is_string()) {
      const auto s = m.get<std::string>();
      if (s == "constant") p.mobility_model = MobilityModel::constant;
      else if (s == "affine") r.fail("params.mobility_model", "affine mobility needs {\"kind\": \"affine\", \"m1\": ...}");
      else r.fail("params.mobility_model", "must be \"constant\" or {\"kind\": \"affine\", \"m1\": ...}");
    } else if (r.object(m, "params.mobility_model", {"kind", "m1"})) {
      std::string kind;
      r.string(m, "params.mobility_model", "kind", kind);
      if (kind == "constant") {
        p.mobility_model = MobilityModel::constant;
      } else if (kind == "affine") {
        p.mobility_model = MobilityModel::affine;
        if (!m.contains("m1")) r.fail("params.mobility_model.m1", "required for affine mobility");
        r.number(m, "params.mobility_model", "m1", p.m1);
      } else {
        r.fail("params.mobility_model.kind", "must be \"constant\" or \"affine\"");
      }
    }
  }
  if (!(p.rho1 > 0.0)) r.fail("params.rho1", "must be > 0");
  if (!(p.rho2 > 0.0)) r.fail("params.rho2", "must be > 0");
  if (!(p.theta > 0.0)) r.fail("params.theta", "must be > 0");
  if (!(p.theta_c > 0.0 && p.theta_c < p.theta)) r.fail("params.theta_c", "must satisfy 0 < θ_c < θ");
  if (!(p.nu1 > 0.0)) r.fail("params.nu1", "must be > 0");
  if (!(p.nu2 > 0.0)) r.fail("params.nu2", "must be > 0");
  if (!(p.m0 > 0.0)) r.fail("params.m0", "must be > 0");
  if (p.mobility_model == MobilityModel::affine && !(std::abs(p.m1) <= 0.9))
    r.fail("params.mobility_model.m1", "must satisfy |m1| <= 0.9 (m >= m0/10 on [-1,1])");
}

void read_run(Reader& r, const json& j, RunConfig& run) {
  if (!r.object(j, "run", {"variant", "eps", "dt", "T", "preset", "preset_params", "seed"})) return;
  std::string variant = run.variant.is_nonlocal() ? "nonlocal" : "local";
  r.string(j, "run", "variant", variant);
  double eps = run.variant.is_nonlocal() ? run.variant.eps : 0.1;
  r.number(j, "run", "eps", eps);
  if (variant == "nonlocal") {
    run.variant = ModelVariant::nonlocal(eps);
    if (!(eps > 0.0)) r.fail("run.eps", "must be > 0");
  } else if (variant == "local") {
    run.variant = ModelVariant::local();
  } else {
    r.fail("run.variant", "must be \"nonlocal\" or \"local\"");
  }
  r.number(j, "run", "dt", run.dt);
  r.number(j, "run", "T", run.T);
  if (!(run.dt > 0.0)) r.fail("run.dt", "must be > 0");
  if (!(run.T >= 0.0)) r.fail("run.T", "must be >= 0");
  if (run.T > 0.0 && run.dt > run.T) r.fail("run.dt", "must not exceed run.T");

  std::string preset = to_string(run.preset.kind);
  r.string(j, "run", "preset", preset);
  try {
    run.preset.kind = preset_from_string(preset);
  } catch (const Error&) {
    r.fail("run.preset", "must be one of \"sinusoid\", \"tanh_interface\", \"random_perturbation\"");
  }
  if (j.contains("preset_params")) {
    const json& pp = j.at("preset_params");
    if (r.object(pp, "run.preset_params", {"amplitude", "width", "perturbation", "mean"})) {
      r.number(pp, "run.preset_params", "amplitude", run.preset.amplitude);
      r.number(pp, "run.preset_params", "width", run.preset.width);
      r.number(pp, "run.preset_params", "perturbation", run.preset.perturbation);
      r.number(pp, "run.preset_params", "mean", run.preset.mean);
      if (!(run.preset.width > 0.0)) r.fail("run.preset_params.width", "must be > 0");
    }
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (s.is_number_unsigned()) run.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer()) r.fail("run.seed", "must be >= 0");
    else r.fail("run.seed", "expected a nonnegative integer");
  }
}

void read_sweep(Reader& r, const json& j, SweepSettings& s) {
  if (!r.object(j, "sweep", {"eps_list", "lemma34_delta"})) return;
  r.number_list(j, "sweep", "eps_list", s.eps_list);
  r.number(j, "sweep", "lemma34_delta", s.lemma34_delta);
  for (std::size_t i = 0; i < s.eps_list.size(); ++i)
    if (!(s.eps_list[i] > 0.0)) r.fail("sweep.eps_list[" + std::to_string(i) + "]", "must be > 0");
  for (std::size_t i = 0; i < s.eps_list.size(); ++i)
    for (std::size_t k = i + 1; k < s.eps_list.size(); ++k)
      if (s.eps_list[i] == s.eps_list[k]) r.fail("sweep.eps_list", "values must be distinct");
  if (!(s.lemma34_delta > 0.0)) r.fail("sweep.lemma34_delta", "must be > 0");
}

void read_checks(Reader& r, const json& j, CheckSettings& c) {
  if (!r.object(j, "checks", {"eps_list", "threshold"})) return;
  r.number_list(j, "checks", "eps_list", c.eps_list);
  r.number(j, "checks", "threshold", c.threshold);
  for (std::size_t i = 0; i < c.eps_list.size(); ++i)
    if (!(c.eps_list[i] > 0.0)) r.fail("checks.eps_list[" + std::to_string(i) + "]", "must be > 0");
  if (!(c.threshold > 0.0)) r.fail("checks.threshold", "must be > 0");
}

void read_output(Reader& r, const json& j, RunConfig& run) {
  if (!r.object(j, "output", {"dir", "snapshot_count"})) return;
  r.string(j, "output", "dir", run.output_dir);
  r.integer(j, "output", "snapshot_count", run.snapshot_count);
  if (run.output_dir.empty()) r.fail("output.dir", "must not be empty");
  if (run.snapshot_count < 0) r.fail("output.snapshot_count", "must be >= 0");
}

void read_solver(Reader& r, const json& j, SolverSettings& s) {
  if (!r.object(j, "solver", {"newton_tol", "newton_max_iter", "linear_tol", "phi_cap", "projection_tol",
                              "momentum_tol", "momentum_max_iter", "viscous_treatment", "max_halvings"}))
    return;
  r.number(j, "solver", "newton_tol", s.ch.newton_tol);
  r.integer(j, "solver", "newton_max_iter", s.ch.newton_max_iter);
  r.number(j, "solver", "linear_tol", s.ch.linear_tol);
  r.number(j, "solver", "phi_cap", s.ch.phi_cap);
  r.number(j, "solver", "projection_tol", s.flow.projection_tol);
  r.number(j, "solver", "momentum_tol", s.flow.momentum_tol);
  r.integer(j, "solver", "momentum_max_iter", s.flow.projection_max_iter);
  r.integer(j, "solver", "max_halvings", s.max_halvings);
  std::string visc = s.flow.viscous_treatment == ViscousTreatment::explicit_ ? "explicit" : "semi_implicit";
  r.string(j, "solver", "viscous_treatment", visc);
  if (visc == "explicit") s.flow.viscous_treatment = ViscousTreatment::explicit_;
  else if (visc == "semi_implicit") s.flow.viscous_treatment = ViscousTreatment::semi_implicit;
  else r.fail("solver.viscous_treatment", "must be \"explicit\" or \"semi_implicit\"");
  if (!(s.ch.newton_tol > 0.0)) r.fail("solver.newton_tol", "must be > 0");
  if (s.ch.newton_max_iter < 1) r.fail("solver.newton_max_iter", "must be >= 1");
  if (!(s.ch.linear_tol > 0.0)) r.fail("solver.linear_tol", "must be > 0");
  if (!(s.ch.phi_cap > 0.0 && s.ch.phi_cap < 1.0)) r.fail("solver.phi_cap", "must lie in (0, 1)");
  if (!(s.flow.projection_tol > 0.0)) r.fail("solver.projection_tol", "must be > 0");
  if (!(s.flow.momentum_tol > 0.0)) r.fail("solver.momentum_tol", "must be > 0");
  if (s.flow.projection_max_iter < 1) r.fail("solver.momentum_max_iter", "must be >= 1");
  if (s.max_halvings < 0) r.fail("solver.max_halvings", "must be >= 0");
}

}  // namespace

AppConfig::AppConfig() {
  run.variant = ModelVariant::nonlocal(0.1);
  run.grid = GridSpec{64, 64, 1.0, 1.0};
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorKind::config, join_issues(issues)), issues_(std::move(issues)) {}

AppConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<document>: malformed JSON: ") + e.what()});
  }
  AppConfig cfg;
  Reader r;
  if (r.object(doc, "", {"grid", "params", "run", "sweep", "checks", "output", "solver"})) {
    if (doc.contains("grid")) read_grid(r, doc.at("grid"), cfg.run.grid);
    if (doc.contains("params")) read_params(r, doc.at("params"), cfg.run.params);
    if (doc.contains("run")) read_run(r, doc.at("run"), cfg.run);
    if (doc.contains("sweep")) read_sweep(r, doc.at("sweep"), cfg.sweep);
    if (doc.contains("checks")) read_checks(r, doc.at("checks"), cfg.checks);
    if (doc.contains("output")) read_output(r, doc.at("output"), cfg.run);
    if (doc.contains("solver")) read_solver(r, doc.at("solver"), cfg.run.solver);
  }
  if (r.issues.empty()) {
    try {
      cfg.run.validate();
    } catch (const Error& e) {
      r.fail("<document>", e.what());
    }
  }
  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return cfg;
}

AppConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json(const AppConfig& cfg) {
  const RunConfig& run = cfg.run;
  const PhysicalParams& p = run.params;
  json doc;
  doc["grid"] = {{"nx", run.grid.nx}, {"ny", run.grid.ny}, {"lx", run.grid.lx}, {"ly", run.grid.ly}};
  json mobility = "constant";
  if (p.mobility_model == MobilityModel::affine) mobility = {{"kind", "affine"}, {"m1", p.m1}};
  doc["params"] = {{"rho1", p.rho1},       {"rho2", p.rho2}, {"theta", p.theta}, {"theta_c", p.theta_c},
                   {"nu1", p.nu1},         {"nu2", p.nu2},   {"m0", p.m0},       {"mobility_model", mobility}};
  doc["run"] = {{"variant", run.variant.is_nonlocal() ? "nonlocal" : "local"},
                {"eps", run.variant.is_nonlocal() ? run.variant.eps : 0.1},
                {"dt", run.dt},
                {"T", run.T},
                {"preset", to_string(run.preset.kind)},
                {"preset_params",
                 {{"amplitude", run.preset.amplitude},
                  {"width", run.preset.width},
                  {"perturbation", run.preset.perturbation},
                  {"mean", run.preset.mean}}},
                {"seed", run.seed}};
  doc["sweep"] = {{"eps_list", cfg.sweep.eps_list}, {"lemma34_delta", cfg.sweep.lemma34_delta}};
  doc["checks"] = {{"eps_list", cfg.checks.eps_list}, {"threshold", cfg.checks.threshold}};
  doc["output"] = {{"dir", run.output_dir}, {"snapshot_count", run.snapshot_count}};
  const SolverSettings& s = run.solver;
  doc["solver"] = {
      {"newton_tol", s.ch.newton_tol},
      {"newton_max_iter", s.ch.newton_max_iter},
      {"linear_tol", s.ch.linear_tol},
      {"phi_cap", s.ch.phi_cap},
      {"projection_tol", s.flow.projection_tol},
      {"momentum_tol", s.flow.momentum_tol},
      {"momentum_max_iter", s.flow.projection_max_iter},
      {"viscous_treatment", s.flow.viscous_treatment == ViscousTreatment::explicit_ ? "explicit" : "semi_implicit"},
      {"max_halvings", s.max_halvings}};
  return doc.dump(2) + "\n";
}

}  // namespace nscheps
