#ifndef ERGOMFG_H
#define ERGOMFG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum ErgomfgStatus {
  ERGOMFG_STATUS_OK = 0,
  ERGOMFG_STATUS_NULL_POINTER = 1,
  ERGOMFG_STATUS_INVALID_UTF8 = 2,
  ERGOMFG_STATUS_INVALID_CONFIG = 3,
  ERGOMFG_STATUS_NO_BRACKET = 4,
  ERGOMFG_STATUS_SOLVER_FAILURE = 5,
  ERGOMFG_STATUS_PANIC = 6,
} ErgomfgStatus;

// Opaque handle to a diffusion, a cost and a quadrature tolerance.
typedef struct ErgomfgProblem ErgomfgProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a problem from `{"model": ..., "cost": ..., "quadrature": ...}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer slot.
enum ErgomfgStatus ergomfg_problem_new(const char *json, struct ErgomfgProblem **out);

// Releases a handle from [`ergomfg_problem_new`]. Null is ignored.
//
// # Safety
// `problem` must come from [`ergomfg_problem_new`] and not be used afterwards.
void ergomfg_problem_free(struct ErgomfgProblem *problem);

// Long-run average cost of reflecting on `[a, b]` with the market statistic frozen at `y`.
//
// # Safety
// `problem` must be a live handle and `out` writable.
enum ErgomfgStatus ergomfg_ergodic_cost(const struct ErgomfgProblem *problem,
                                        double a,
                                        double b,
                                        double y,
                                        double *out);

// Stationary mean of the market statistic under reflection on `[a, b]`.
//
// # Safety
// `problem` must be a live handle and `out` writable.
enum ErgomfgStatus ergomfg_stationary_mean(const struct ErgomfgProblem *problem,
                                           double a,
                                           double b,
                                           double *out);

// Optimal barriers against a frozen `y`, searched on `grid_n` nodes of `[lo, hi]`.
//
// # Safety
// `problem` must be a live handle; `a_out`, `b_out` and `value_out` writable.
enum ErgomfgStatus ergomfg_solve_control(const struct ErgomfgProblem *problem,
                                         double y,
                                         double lo,
                                         double hi,
                                         size_t grid_n,
                                         double *a_out,
                                         double *b_out,
                                         double *value_out);

// Shooting value of the free-boundary problem on `[a, b]` at frozen `y`.
// `steps == 0` selects the default resolution.
//
// # Safety
// `problem` must be a live handle and `out` writable.
enum ErgomfgStatus ergomfg_hjb_lambda(const struct ErgomfgProblem *problem,
                                      double a,
                                      double b,
                                      double y,
                                      size_t steps,
                                      double *out);

// Equilibrium pairs on `grid_n` nodes of `[lo, hi]`, as a JSON array.
// The string must be released with [`ergomfg_string_free`].
//
// # Safety
// `problem` must be a live handle and `out_json` writable.
enum ErgomfgStatus ergomfg_find_equilibria(const struct ErgomfgProblem *problem,
                                           double lo,
                                           double hi,
                                           size_t grid_n,
                                           char **out_json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void ergomfg_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *ergomfg_last_error(void);

// Library version, static storage.
const char *ergomfg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGOMFG_H */
