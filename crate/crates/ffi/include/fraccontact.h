#ifndef FRACCONTACT_H
#define FRACCONTACT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_DOMAIN = 1,
  FC_STATUS_OVERFLOW = 2,
  FC_STATUS_CONVERGENCE = 3,
  FC_STATUS_NUMERICAL = 4,
  FC_STATUS_CONFIG = 5,
  FC_STATUS_IO = 6,
  FC_STATUS_NULL_POINTER = 7,
  FC_STATUS_INVALID_UTF8 = 8,
  FC_STATUS_OUT_OF_RANGE = 9,
  FC_STATUS_PANIC = 10,
} FcStatus;

/**
 * Parsed scenario configuration.
 */
typedef struct FcScenario FcScenario;

/**
 * Norm rows of a chain solve, possibly partial.
 */
typedef struct FcSolution FcSolution;

/**
 * One row of the chain norm table.
 */
typedef struct FcNormRow {
  size_t n;
  double t;
  double max_norm;
  double probe_value;
} FcNormRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fc_version(void);

/**
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum FcStatus fc_gamma(double x, double *out);

/**
 * Two-parameter Mittag-Leffler function E_{α,β}(z); α in (0, 1].
 *
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum FcStatus fc_mittag_leffler(double alpha, double beta, double z, double *out);

/**
 * Wright function Φ_α(z); α in (0, 1), z ≥ 0.
 *
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum FcStatus fc_wright(double alpha, double z, double *out);

/**
 * A priori bound on the order-n correlation norm at time t, chosen by the
 * regime of κ. `a` is the kernel constant (at least 1).
 *
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum FcStatus fc_bound(size_t n,
                       double t,
                       double alpha,
                       double kappa,
                       double c,
                       double a,
                       double *out);

/**
 * Parses a scenario from configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for a write.
 */
enum FcStatus fc_scenario_parse(const char *text, struct FcScenario **out);

/**
 * Loads a scenario from a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for a write.
 */
enum FcStatus fc_scenario_load(const char *path, struct FcScenario **out);

/**
 * Replaces the scenario's output times.
 *
 * # Safety
 * `scenario` must come from `fc_scenario_parse`/`fc_scenario_load`;
 * `times` must point to `len` doubles.
 */
enum FcStatus fc_scenario_set_times(struct FcScenario *scenario, const double *times, size_t len);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void fc_scenario_free(struct FcScenario *scenario);

/**
 * Solves the correlation chain of a scenario.
 *
 * On a numerical failure part way through (typically overflow), `*out`
 * still receives a solution holding the rows completed before the failure
 * and the failure status is returned. On other failures `*out` is null.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for a write.
 */
enum FcStatus fc_solve(const struct FcScenario *scenario, struct FcSolution **out);

/**
 * Number of rows in a solution; 0 for a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t fc_solution_len(const struct FcSolution *solution);

/**
 * Copies row `index` (ordered by n, then t) into `*out`.
 *
 * # Safety
 * `solution` must be a live handle; `out` must be valid for a write.
 */
enum FcStatus fc_solution_row(const struct FcSolution *solution,
                              size_t index,
                              struct FcNormRow *out);

/**
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void fc_solution_free(struct FcSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACCONTACT_H */
