#ifndef HBCS_H
#define HBCS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HbcsOutcome {
  HBCS_OUTCOME_CERTIFIED_BIBO = 0,
  HBCS_OUTCOME_INCONCLUSIVE = 1,
  HBCS_OUTCOME_INVALID_INPUT = 2,
} HbcsOutcome;

typedef enum HbcsStatus {
  HBCS_STATUS_OK = 0,
  HBCS_STATUS_NULL_POINTER = 1,
  HBCS_STATUS_PARSE = 2,
  HBCS_STATUS_INVALID_INPUT = 3,
  HBCS_STATUS_NUMERICAL = 4,
  HBCS_STATUS_BUFFER_TOO_SMALL = 5,
  HBCS_STATUS_PANIC = 6,
} HbcsStatus;

/**
 * Opaque handle to a parsed system.
 */
typedef struct HbcsSystem HbcsSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library.
 */
const char *hbcs_last_error(void);

/**
 * Parse a JSON system definition. On success `*out` owns a handle for [`hbcs_system_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HbcsStatus hbcs_system_from_json(const char *json, struct HbcsSystem **out);

/**
 * # Safety
 * `sys` must come from [`hbcs_system_from_json`] and not be used afterwards. Null is ignored.
 */
void hbcs_system_free(struct HbcsSystem *sys);

/**
 * # Safety
 * Pointers must be valid.
 */
enum HbcsStatus hbcs_system_dim(const struct HbcsSystem *sys, size_t *n);

/**
 * Run all structural checks; `*ok` is 1 when every check passes.
 * The names of failed checks are reported through [`hbcs_last_error`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum HbcsStatus hbcs_validate(const struct HbcsSystem *sys, double tol, int32_t *ok);

/**
 * Evaluate the transfer function at `s = re + i·im`, writing it row-major into
 * `out_re`/`out_im`, each holding `len ≥ n²` doubles.
 *
 * # Safety
 * Output buffers must hold `len` doubles.
 */
enum HbcsStatus hbcs_transfer_eval(const struct HbcsSystem *sys,
                                   double re,
                                   double im,
                                   double *out_re,
                                   double *out_im,
                                   size_t len);

/**
 * Attempt a BIBO certificate. `*report` receives a JSON string for [`hbcs_string_free`];
 * pass null to skip it.
 *
 * # Safety
 * `sys` and `outcome` must be valid; `report` may be null.
 */
enum HbcsStatus hbcs_certify(const struct HbcsSystem *sys,
                             size_t k_max,
                             enum HbcsOutcome *outcome,
                             char **report);

/**
 * Simulate the zero-state response to the constant input `u` (length n) on `[0, t_end]`
 * and store `sup_t max_i |y_i(t)|` in `*sup_y`.
 *
 * # Safety
 * `u` must hold `n` doubles.
 */
enum HbcsStatus hbcs_simulate_constant(const struct HbcsSystem *sys,
                                       const double *u,
                                       size_t n,
                                       double t_end,
                                       double dt,
                                       double *sup_y);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void hbcs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HBCS_H */
