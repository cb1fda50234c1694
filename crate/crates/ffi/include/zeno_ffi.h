#ifndef ZENO_FFI_H
#define ZENO_FFI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZenoStatus {
  ZENO_STATUS_OK = 0,
  ZENO_STATUS_NULL_POINTER = 1,
  ZENO_STATUS_INVALID_UTF8 = 2,
  ZENO_STATUS_CONFIG_ERROR = 3,
  ZENO_STATUS_SIMULATION_ERROR = 4,
  ZENO_STATUS_INVALID_ARGUMENT = 5,
  ZENO_STATUS_NOT_FOUND = 6,
  ZENO_STATUS_PANIC = 7,
} ZenoStatus;

/**
 * Opaque handle to a finished run.
 */
typedef struct ZenoResult ZenoResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *zeno_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *zeno_last_error_message(void);

/**
 * Upper-level population after `n` equally spaced ideal measurements
 * during a pi-pulse.
 *
 * # Safety
 * `out` must be a valid pointer to a `double`.
 */
enum ZenoStatus zeno_ideal_p2(size_t n, double *out);

/**
 * Short-time survival product `[1 − (ΔH·T/n)²]ⁿ`; `out_valid` reports
 * whether the short-time expansion applies.
 *
 * # Safety
 * `out_value` and `out_valid` must be valid pointers.
 */
enum ZenoStatus zeno_survival_product(size_t n,
                                      double energy_variance,
                                      double total_time,
                                      double *out_value,
                                      bool *out_valid);

/**
 * Parses a TOML experiment document and runs its scenario.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out` a valid pointer that
 * receives a handle to free with [`zeno_result_free`].
 */
enum ZenoStatus zeno_run_config(const char *config_toml, struct ZenoResult **out);

/**
 * Looks up a summary scalar such as `p2_final`.
 *
 * # Safety
 * `result` must be a live handle, `key` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum ZenoStatus zeno_result_summary(const struct ZenoResult *result, const char *key, double *out);

/**
 * Number of time samples and of population series.
 *
 * # Safety
 * `result` must be a live handle; output pointers must be valid.
 */
enum ZenoStatus zeno_result_len(const struct ZenoResult *result,
                                size_t *out_samples,
                                size_t *out_series);

/**
 * Time and population of series `series` at sample `sample`.
 *
 * # Safety
 * `result` must be a live handle; output pointers must be valid.
 */
enum ZenoStatus zeno_result_population(const struct ZenoResult *result,
                                       size_t series,
                                       size_t sample,
                                       double *out_time,
                                       double *out_value);

/**
 * Serializes the whole result as JSON; free the string with
 * [`zeno_string_free`].
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum ZenoStatus zeno_result_to_json(const struct ZenoResult *result, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void zeno_string_free(char *s);

/**
 * # Safety
 * `result` must be NULL or a handle from [`zeno_run_config`], not yet freed.
 */
void zeno_result_free(struct ZenoResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZENO_FFI_H */
