/* C API of the insulate library: thermal-insulation free-boundary solvers
 * behind opaque handles and status codes. All functions return INS_OK on
 * success; ins_last_error() describes the most recent failure on the calling
 * thread. */

#ifndef INSULATE_H
#define INSULATE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ins_config ins_config;
typedef struct ins_result ins_result;

typedef enum {
  INS_OK = 0,
  INS_ERR_CONFIG = 2,   /* malformed config / precondition violation */
  INS_ERR_SOLVER = 3,   /* solver fault (non-convergence, inconsistency) */
  INS_ERR_INVALID = 4,  /* invalid handle or argument */
  INS_ERR_BUFFER = 5    /* output buffer too small */
} ins_status;

const char* ins_version(void);
const char* ins_last_error(void);

/* Configuration: built-in defaults, file loading, dotted-key overrides.
 * strict != 0 rejects keys outside the reference set. */
ins_status ins_config_create(ins_config** out);
ins_status ins_config_load(const char* path, int strict, ins_config** out);
ins_status ins_config_set(ins_config* cfg, const char* dotted_key, const char* value, int strict);
ins_status ins_config_get(const ins_config* cfg, const char* dotted_key, char* buf, size_t buflen);
ins_status ins_config_dump(const ins_config* cfg, char* buf, size_t buflen);
void ins_config_free(ins_config* cfg);

/* Runs one subcommand (radial | shape-opt | phase-field | analyze), writing
 * artifacts and manifest.json under out_dir (NULL: $INSULATE_OUT, then the
 * config's [output] dir, then "./out"). */
ins_status ins_run(const ins_config* cfg, const char* subcommand, const char* out_dir,
                   uint64_t seed, ins_result** out);
ins_status ins_result_summary(const ins_result* res, char* buf, size_t buflen);
ins_status ins_result_artifact_count(const ins_result* res, size_t* out);
ins_status ins_result_artifact(const ins_result* res, size_t index, char* buf, size_t buflen);
void ins_result_free(ins_result* res);

/* Closed-form radial oracle (dim 2 or 3). breakdown = {dirichlet, surface,
 * volume, total}. */
ins_status ins_radial_profile(int dim, double h, double rho0, double big_r, double* coef,
                              double* u_outer);
ins_status ins_radial_energy(int dim, double h, double c0, double rho0, double big_r,
                             double breakdown[4]);
ins_status ins_optimize_radius(int dim, double h, double c0, double rho0, double* r_star,
                               double* f_star, int* interior, int* attained);

#ifdef __cplusplus
}
#endif

#endif /* INSULATE_H */
