/* C interface of the nscheps library. All functions returning int return an
 * nscheps_status; on failure nscheps_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread). */
#ifndef NSCHEPS_NSCHEPS_H
#define NSCHEPS_NSCHEPS_H

#include <stddef.h>
#include <stdint.h>

#if defined(NSCHEPS_BUILDING_LIBRARY)
#define NSCHEPS_API __attribute__((visibility("default")))
#else
#define NSCHEPS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nscheps_status {
  NSCHEPS_OK = 0,
  NSCHEPS_ERR_ASSERTION = 1,
  NSCHEPS_ERR_CONFIG = 2,
  NSCHEPS_ERR_SOLVER = 3
} nscheps_status;

typedef struct nscheps_config nscheps_config;
typedef struct nscheps_sim nscheps_sim;

typedef struct nscheps_energy {
  double t;
  double kinetic;
  double e0_part;
  double potential_part;
  double total;
  double dissipation_cum;
  double mass_mean;
  double max_abs_phi;
  double div_v_norm;
} nscheps_energy;

NSCHEPS_API const char* nscheps_version(void);
NSCHEPS_API const char* nscheps_last_error(void);

/* Configs. Strict JSON; unknown keys and violated constraints give NSCHEPS_ERR_CONFIG. */
NSCHEPS_API int nscheps_config_from_file(const char* path, nscheps_config** out);
NSCHEPS_API int nscheps_config_from_json(const char* text, nscheps_config** out);
NSCHEPS_API void nscheps_config_free(nscheps_config* cfg);
NSCHEPS_API int nscheps_config_set_seed(nscheps_config* cfg, uint64_t seed);
NSCHEPS_API int nscheps_config_set_output_dir(nscheps_config* cfg, const char* dir);
/* Canonical JSON; the string is owned by cfg and valid until the next call on it. */
NSCHEPS_API const char* nscheps_config_json(nscheps_config* cfg);

/* Runs a subcommand ("simulate", "sweep", "gamma-check", "operator-check",
 * "lemma34", "validate") and returns its exit code (an nscheps_status value).
 * Progress and summaries go to stdout unless quiet, diagnostics to stderr. */
NSCHEPS_API int nscheps_run_command(const char* command, const nscheps_config* cfg, int quiet);

/* Simulations start from the configured preset at rest. */
NSCHEPS_API int nscheps_sim_create(const nscheps_config* cfg, nscheps_sim** out);
NSCHEPS_API void nscheps_sim_free(nscheps_sim* sim);
NSCHEPS_API int nscheps_sim_step(nscheps_sim* sim, double dt);
/* `steps` steps of the configured dt. */
NSCHEPS_API int nscheps_sim_advance(nscheps_sim* sim, int steps);
NSCHEPS_API int nscheps_sim_grid(const nscheps_sim* sim, int* nx, int* ny);
NSCHEPS_API int nscheps_sim_time(const nscheps_sim* sim, double* t);
/* Cell fields, row-major, len must equal nx*ny. */
NSCHEPS_API int nscheps_sim_copy_phi(const nscheps_sim* sim, double* buf, size_t len);
NSCHEPS_API int nscheps_sim_copy_mu(const nscheps_sim* sim, double* buf, size_t len);
/* Latest energy record (the initial one before any step). */
NSCHEPS_API int nscheps_sim_energy(const nscheps_sim* sim, nscheps_energy* out);
NSCHEPS_API int nscheps_sim_history_length(const nscheps_sim* sim, size_t* n);
/* Max over steps of E(t_n) + dissipation - E(0), and the accepted tolerance. */
NSCHEPS_API int nscheps_sim_audit(const nscheps_sim* sim, double* max_violation, double* tolerance);
NSCHEPS_API int nscheps_sim_write_snapshot(const nscheps_sim* sim, const char* path);

#ifdef __cplusplus
}
#endif

#endif
