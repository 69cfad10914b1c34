/* C interface to the zippered renormalization toolkit. */

#ifndef ZIPPERED_H
#define ZIPPERED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Orbit deduplication mode for `zr_count_grid_json`.
 */
typedef enum ZrOrbitMode {
  ZR_ORBIT_MODE_CANONICAL = 0,
  ZR_ORBIT_MODE_ANY_ROTATION = 1,
} ZrOrbitMode;

/**
 * Sector restriction for `zr_count_grid_json`.
 */
typedef enum ZrSector {
  ZR_SECTOR_NONE = 0,
  ZR_SECTOR_FIRST_OP_A = 1,
  ZR_SECTOR_FIRST_OP_B = 2,
} ZrSector;

/**
 * Status codes shared by every entry point.
 */
typedef enum ZrStatus {
  ZR_STATUS_OK = 0,
  ZR_STATUS_INVALID_ARGUMENT = -1,
  ZR_STATUS_REDUCIBLE = -2,
  ZR_STATUS_DEGENERATE = -3,
  ZR_STATUS_NOT_PRIMITIVE = -4,
  ZR_STATUS_NOT_ADMISSIBLE = -5,
  ZR_STATUS_BUDGET_EXCEEDED = -6,
  ZR_STATUS_PARSE_ERROR = -7,
  ZR_STATUS_STALL = -8,
  ZR_STATUS_NULL_POINTER = -9,
  ZR_STATUS_INVALID_UTF8 = -10,
  ZR_STATUS_INTERNAL = -99,
} ZrStatus;

/**
 * Opaque Rauzy class handle.
 */
typedef struct ZrClass ZrClass;

/**
 * Opaque accelerated-induction iterator.
 */
typedef struct ZrIet ZrIet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *zr_version(void);

/**
 * Thread-local message for the most recent error; empty until a failure.
 */
const char *zr_last_error(void);

/**
 * Releases a string returned through a `char**` output.
 *
 * # Safety
 * `s` must come from this library and not have been freed before.
 */
void zr_string_free(char *s);

/**
 * Builds the Rauzy class of a 1-indexed image list such as `"3,2,1"`.
 *
 * # Safety
 * `pi_csv` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum ZrStatus zr_class_new(const char *pi_csv, struct ZrClass **out);

/**
 * # Safety
 * `class` must come from `zr_class_new` and not have been freed.
 */
void zr_class_free(struct ZrClass *class_);

/**
 * Number of permutations in the class.
 *
 * # Safety
 * `class` and `out` must be valid pointers.
 */
enum ZrStatus zr_class_size(const struct ZrClass *class_, uintptr_t *out);

/**
 * Symbol count `m` of the class.
 *
 * # Safety
 * `class` and `out` must be valid pointers.
 */
enum ZrStatus zr_class_m(const struct ZrClass *class_, uintptr_t *out);

/**
 * Serializes the class (members in canonical order plus labeled edges).
 *
 * # Safety
 * `class` and `out` must be valid pointers; release the string with
 * `zr_string_free`.
 */
enum ZrStatus zr_class_to_json(const struct ZrClass *class_, char **out);

/**
 * Word report (letters, matrix, norm, admissibility, cylinder volume) for
 * `word_tokens` like `"a1,b2"` chained from the base permutation.
 *
 * # Safety
 * Inputs must be NUL-terminated strings; `out` must be valid. Release the
 * string with `zr_string_free`.
 */
enum ZrStatus zr_word_info_json(const char *pi_csv, const char *word_tokens, char **out);

/**
 * Runs a grid count and returns the JSON report (rows, slopes, abort flag).
 * A budget abort still writes the partial report and returns
 * `ZR_STATUS_BUDGET_EXCEEDED`; `budget` zero means the library default.
 *
 * # Safety
 * `pi_csv` must be NUL-terminated; `prefix_tokens` may be NULL; `out` must
 * be valid. Release the string with `zr_string_free`.
 */
enum ZrStatus zr_count_grid_json(const char *pi_csv,
                                 double t_min,
                                 double t_max,
                                 double step,
                                 const char *prefix_tokens,
                                 enum ZrSector sector,
                                 enum ZrOrbitMode orbit_mode,
                                 uint64_t budget,
                                 uint32_t threads,
                                 char **out);

/**
 * Creates an induction iterator from lengths (normalized to unit sum).
 *
 * # Safety
 * `lambda` must point to `len` doubles; `out` must be valid.
 */
enum ZrStatus zr_iet_new(const char *pi_csv,
                         const double *lambda,
                         uintptr_t len,
                         struct ZrIet **out);

/**
 * # Safety
 * `iet` must come from `zr_iet_new` and not have been freed.
 */
void zr_iet_free(struct ZrIet *iet);

/**
 * Advances one accelerated step; writes the consumed letter as `(op, n)`
 * with `op` 0 for `a`, 1 for `b`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum ZrStatus zr_iet_zorich_step(struct ZrIet *iet, uint8_t *op_out, uint64_t *n_out);

/**
 * Copies the current normalized lengths into `out[0..len]`.
 *
 * # Safety
 * `out` must point to at least `len` doubles.
 */
enum ZrStatus zr_iet_lambda(const struct ZrIet *iet, double *out, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZIPPERED_H */
