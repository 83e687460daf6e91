#ifndef HEM_H
#define HEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which HEM constant.
 */
typedef enum {
  HEM_CONSTANT_LABEL_BULK12 = 0,
  HEM_CONSTANT_LABEL_BULK21 = 1,
  HEM_CONSTANT_LABEL_BOUNDARY12 = 2,
  HEM_CONSTANT_LABEL_BOUNDARY21 = 3,
} HemConstantLabel;

/**
 * Result code of every fallible call.
 */
typedef enum {
  HEM_STATUS_OK = 0,
  HEM_STATUS_NULL_POINTER = 1,
  HEM_STATUS_INVALID_PARAMS = 2,
  HEM_STATUS_USAGE = 3,
  HEM_STATUS_PHASE = 4,
  HEM_STATUS_DOMAIN = 5,
  HEM_STATUS_NUMERICAL = 6,
  HEM_STATUS_IO = 7,
  HEM_STATUS_PANIC = 8,
} HemStatus;

/**
 * Opaque model parameters.
 */
typedef struct HemParams HemParams;

/**
 * Opaque verification report.
 */
typedef struct HemReport HemReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *hem_last_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *hem_version(void);

/**
 * Creates parameters; `*out` receives a handle to free with [`hem_params_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
HemStatus hem_params_new(double gamma, double mu, double mu_l, double mu_r, HemParams **out);

/**
 * # Safety
 * `params` must be NULL or a handle from [`hem_params_new`], not yet freed.
 */
void hem_params_free(HemParams *params);

/**
 * Stated and chained values of one HEM constant.
 *
 * # Safety
 * `params` must be a live handle; `stated` and `chained` writable.
 */
HemStatus hem_constant_eval(const HemParams *params,
                            HemConstantLabel label,
                            double *stated,
                            double *chained);

/**
 * Closed-form `S_{2,2}(a, b, c)`.
 *
 * # Safety
 * `out` must be writable.
 */
HemStatus hem_selberg22(double a, double b, double c, double *out);

/**
 * Stated residue of `J₁` at `α_{2,1}`.
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
HemStatus hem_residue_j1(const HemParams *params, double *out);

/**
 * Runs a named suite (`algebra`, `selberg`, `residues`, `chains`, `gmc`,
 * `all`) with default options and the given seed.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` writable.
 */
HemStatus hem_suite_run(const char *name, uint64_t seed, HemReport **out);

/**
 * 1 when no check failed, 0 otherwise, -1 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int hem_report_passed(const HemReport *report);

/**
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t hem_report_check_count(const HemReport *report);

/**
 * Canonical JSON of the report; free with [`hem_string_free`]. NULL on a
 * NULL handle.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
char *hem_report_json(const HemReport *report);

/**
 * # Safety
 * `report` must be NULL or a handle from [`hem_suite_run`], not yet freed.
 */
void hem_report_free(HemReport *report);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void hem_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEM_H */
