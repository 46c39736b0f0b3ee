#include "nscheps/nscheps.h"

#include <iostream>
#include <new>
#include <string>

#include "nscheps/analysis.hpp"
#include "nscheps/commands.hpp"
#include "nscheps/config.hpp"
#include "nscheps/coupled.hpp"
#include "nscheps/output.hpp"

struct nscheps_config {
  nscheps::AppConfig cfg;
  std::string json;
};

struct nscheps_sim {
  nscheps::Simulation sim;
};

namespace {

thread_local std::string last_error;

int fail(nscheps_status status, std::string msg) {
  last_error = std::move(msg);
  return status;
}

int status_for(nscheps::ErrorKind kind) {
  return kind == nscheps::ErrorKind::solver ? NSCHEPS_ERR_SOLVER : NSCHEPS_ERR_CONFIG;
}

template <class F>
int guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const nscheps::Error& e) {
    return fail(static_cast<nscheps_status>(status_for(e.kind())), std::string(nscheps::to_string(e.kind())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(NSCHEPS_ERR_SOLVER, "out of memory");
  } catch (const std::exception& e) {
    return fail(NSCHEPS_ERR_SOLVER, std::string("internal error: ") + e.what());
  }
}

int null_arg(const char* what) { return fail(NSCHEPS_ERR_CONFIG, std::string("null argument: ") + what); }

int copy_cells(const nscheps::ScalarField& f, double* buf, size_t len) {
  if (!buf) return null_arg("buf");
  if (len != f.values.size())
    return fail(NSCHEPS_ERR_CONFIG, "buffer length " + std::to_string(len) + " does not match nx*ny = " +
                                        std::to_string(f.values.size()));
  std::copy(f.values.begin(), f.values.end(), buf);
  return NSCHEPS_OK;
}

}  // namespace

extern "C" {

const char* nscheps_version(void) { return "0.1.0"; }

const char* nscheps_last_error(void) { return last_error.c_str(); }

int nscheps_config_from_file(const char* path, nscheps_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new nscheps_config{nscheps::parse_config(path), {}};
    return NSCHEPS_OK;
  });
}

int nscheps_config_from_json(const char* text, nscheps_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new nscheps_config{nscheps::parse_config_text(text), {}};
    return NSCHEPS_OK;
  });
}

void nscheps_config_free(nscheps_config* cfg) { delete cfg; }

int nscheps_config_set_seed(nscheps_config* cfg, uint64_t seed) {
  if (!cfg) return null_arg("cfg");
  cfg->cfg.run.seed = seed;
  return NSCHEPS_OK;
}

int nscheps_config_set_output_dir(nscheps_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir || !*dir) return fail(NSCHEPS_ERR_CONFIG, "output directory must be a non-empty string");
  cfg->cfg.run.output_dir = dir;
  return NSCHEPS_OK;
}

const char* nscheps_config_json(nscheps_config* cfg) {
  if (!cfg) {
    null_arg("cfg");
    return nullptr;
  }
  cfg->json = nscheps::config_to_json(cfg->cfg);
  return cfg->json.c_str();
}

int nscheps_run_command(const char* command, const nscheps_config* cfg, int quiet) {
  if (!command) return null_arg("command");
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    nscheps::CommandOptions opts;
    opts.quiet = quiet != 0;
    const int code = nscheps::run_command(command, cfg->cfg, opts, std::cout, std::cerr);
    if (code != NSCHEPS_OK) last_error = std::string("command '") + command + "' exited with code " + std::to_string(code);
    return code;
  });
}

int nscheps_sim_create(const nscheps_config* cfg, nscheps_sim** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new nscheps_sim{nscheps::Simulation(cfg->cfg.run)};
    return NSCHEPS_OK;
  });
}

void nscheps_sim_free(nscheps_sim* sim) { delete sim; }

int nscheps_sim_step(nscheps_sim* sim, double dt) {
  if (!sim) return null_arg("sim");
  if (!(dt > 0.0)) return fail(NSCHEPS_ERR_CONFIG, "dt must be positive");
  return guarded([&] {
    sim->sim.step(dt);
    return NSCHEPS_OK;
  });
}

int nscheps_sim_advance(nscheps_sim* sim, int steps) {
  if (!sim) return null_arg("sim");
  if (steps < 0) return fail(NSCHEPS_ERR_CONFIG, "steps must be nonnegative");
  return guarded([&] {
    const double dt = sim->sim.config().dt;
    for (int k = 0; k < steps; ++k) sim->sim.step(dt);
    return NSCHEPS_OK;
  });
}

int nscheps_sim_grid(const nscheps_sim* sim, int* nx, int* ny) {
  if (!sim) return null_arg("sim");
  if (!nx || !ny) return null_arg("nx/ny");
  *nx = sim->sim.config().grid.nx;
  *ny = sim->sim.config().grid.ny;
  return NSCHEPS_OK;
}

int nscheps_sim_time(const nscheps_sim* sim, double* t) {
  if (!sim) return null_arg("sim");
  if (!t) return null_arg("t");
  *t = sim->sim.state().t;
  return NSCHEPS_OK;
}

int nscheps_sim_copy_phi(const nscheps_sim* sim, double* buf, size_t len) {
  if (!sim) return null_arg("sim");
  return copy_cells(sim->sim.state().phi, buf, len);
}

int nscheps_sim_copy_mu(const nscheps_sim* sim, double* buf, size_t len) {
  if (!sim) return null_arg("sim");
  return copy_cells(sim->sim.state().mu, buf, len);
}

int nscheps_sim_energy(const nscheps_sim* sim, nscheps_energy* out) {
  if (!sim) return null_arg("sim");
  if (!out) return null_arg("out");
  const nscheps::SimState& s = sim->sim.state();
  const nscheps::EnergyRecord& r = s.energy_history.empty() ? s.initial : s.energy_history.back();
  *out = nscheps_energy{r.t,         r.kinetic,   r.e0,          r.potential, r.total(),
                        r.dissipation_cum, r.mass_mean, r.max_abs_phi, r.div_v_norm};
  return NSCHEPS_OK;
}

int nscheps_sim_history_length(const nscheps_sim* sim, size_t* n) {
  if (!sim) return null_arg("sim");
  if (!n) return null_arg("n");
  *n = sim->sim.state().energy_history.size();
  return NSCHEPS_OK;
}

int nscheps_sim_audit(const nscheps_sim* sim, double* max_violation, double* tolerance) {
  if (!sim) return null_arg("sim");
  if (!max_violation || !tolerance) return null_arg("max_violation/tolerance");
  const nscheps::AuditRecord a = nscheps::energy_audit(sim->sim.state());
  *max_violation = a.max_violation;
  *tolerance = a.tolerance;
  return NSCHEPS_OK;
}

int nscheps_sim_write_snapshot(const nscheps_sim* sim, const char* path) {
  if (!sim) return null_arg("sim");
  if (!path) return null_arg("path");
  return guarded([&] {
    nscheps::write_snapshot(sim->sim.state(), path);
    return NSCHEPS_OK;
  });
}

}  // extern "C"
