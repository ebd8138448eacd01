#ifndef NLDIRAC_H
#define NLDIRAC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Right-movers (`u`, profile G1) or left-movers (`v`, profile G2).
 */
typedef enum {
  NLDIRAC_SIDE_RIGHT = 0,
  NLDIRAC_SIDE_LEFT = 1,
} NldiracSide;

typedef enum {
  NLDIRAC_STATUS_OK = 0,
  NLDIRAC_STATUS_NULL_POINTER = 1,
  NLDIRAC_STATUS_INVALID_UTF8 = 2,
  NLDIRAC_STATUS_INVALID_CONFIG = 3,
  NLDIRAC_STATUS_INVALID_ARGUMENT = 4,
  NLDIRAC_STATUS_SOLVER_ERROR = 5,
  NLDIRAC_STATUS_IO_ERROR = 6,
  NLDIRAC_STATUS_BUFFER_TOO_SMALL = 7,
  NLDIRAC_STATUS_CHECKS_FAILED = 8,
  NLDIRAC_STATUS_PANIC = 99,
} NldiracStatus;

/**
 * Validated experiment configuration.
 */
typedef struct NldiracConfig NldiracConfig;

/**
 * Result of a solver run.
 */
typedef struct NldiracTrajectory NldiracTrajectory;

/**
 * `re + i·im`, layout-compatible with `double _Complex`.
 */
typedef struct {
  double re;
  double im;
} NldiracComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL-terminated, into
 * `buf`. Returns the message length excluding the terminator; the copy is
 * truncated when `cap` is too small. `buf` may be null to query the length.
 */
size_t nldirac_last_error(char *buf, size_t cap);

/**
 * Parses configuration text (TOML). On success `*out` owns a new handle.
 */
NldiracStatus nldirac_config_parse(const char *text, NldiracConfig **out);

/**
 * Reads and parses a configuration file.
 */
NldiracStatus nldirac_config_load(const char *path, NldiracConfig **out);

void nldirac_config_free(NldiracConfig *cfg);

/**
 * Writes the 64 hex digits of the configuration hash plus a NUL into
 * `buf`, which must hold at least 65 bytes.
 */
NldiracStatus nldirac_config_hash(const NldiracConfig *cfg, char *buf, size_t cap);

/**
 * Runs the solver, recording the configured record times and `T`.
 */
NldiracStatus nldirac_run(const NldiracConfig *cfg, NldiracTrajectory **out);

void nldirac_trajectory_free(NldiracTrajectory *traj);

/**
 * Relative drift of the total charge over the stored snapshots.
 */
NldiracStatus nldirac_trajectory_charge_drift(const NldiracTrajectory *traj, double *out);

/**
 * Number of stored snapshots (the first is `t = 0`, the last is `T`).
 */
NldiracStatus nldirac_trajectory_snapshot_count(const NldiracTrajectory *traj, size_t *out);

/**
 * Node coordinates of the padded lattice.
 */
NldiracStatus nldirac_trajectory_nodes(const NldiracTrajectory *traj,
                                       double *x,
                                       size_t cap,
                                       size_t *len);

/**
 * Copies snapshot `index`: its time into `*t` and `u`, `v` into the two
 * buffers, each of capacity `cap` nodes.
 */
NldiracStatus nldirac_trajectory_snapshot(const NldiracTrajectory *traj,
                                          size_t index,
                                          double *t,
                                          NldiracComplex *u,
                                          NldiracComplex *v,
                                          size_t cap,
                                          size_t *len);

/**
 * Scattering profile truncated at `T`, sampled at `y` (both buffers of
 * capacity `cap`).
 */
NldiracStatus nldirac_trajectory_profile(const NldiracTrajectory *traj,
                                         NldiracSide side,
                                         double *y,
                                         NldiracComplex *values,
                                         size_t cap,
                                         size_t *len);

/**
 * Evaluates the nonlinear terms `N1(u, v)`, `N2(u, v)` for coupling `(alpha, beta)`.
 */
NldiracStatus nldirac_eval_nonlinearity(double alpha,
                                        double beta,
                                        NldiracComplex u,
                                        NldiracComplex v,
                                        NldiracComplex *n1,
                                        NldiracComplex *n2);

/**
 * Runs a full experiment, writing artifacts to `out_dir`. Returns
 * `ChecksFailed` when it ran but some check did not pass.
 */
NldiracStatus nldirac_run_experiment(const NldiracConfig *cfg, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLDIRAC_H */
