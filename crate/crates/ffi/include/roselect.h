#ifndef ROSELECT_H
#define ROSELECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum RoselStatus {
  ROSEL_STATUS_OK = 0,
  ROSEL_STATUS_NULL_POINTER = 1,
  ROSEL_STATUS_INVALID_ARGUMENT = 2,
  ROSEL_STATUS_PARAMETER_ERROR = 3,
  ROSEL_STATUS_BUDGET_EXCEEDED = 4,
  ROSEL_STATUS_IO_ERROR = 5,
  ROSEL_STATUS_INTERNAL_ERROR = 6,
} RoselStatus;

/**
 * Input distribution for generated arrays.
 */
typedef enum RoselDistribution {
  ROSEL_DISTRIBUTION_UNIFORM_PERMUTATION = 0,
  ROSEL_DISTRIBUTION_SORTED = 1,
  ROSEL_DISTRIBUTION_REVERSE_SORTED = 2,
  ROSEL_DISTRIBUTION_FEW_DISTINCT = 3,
} RoselDistribution;

/**
 * Algorithm selector.
 */
typedef enum RoselAlgorithm {
  /**
   * Linear-time in Θ(N) bits, or the budgeted algorithm when a
   * budget below the linear-bits peak is given.
   */
  ROSEL_ALGORITHM_AUTO = 0,
  ROSEL_ALGORITHM_LINEAR_BITS = 1,
  ROSEL_ALGORITHM_GENERAL = 2,
  ROSEL_ALGORITHM_LOG_SQUARED = 3,
  ROSEL_ALGORITHM_BASELINE = 4,
} RoselAlgorithm;

/**
 * Opaque handle to a loaded input array.
 */
typedef struct RoselArray RoselArray;

/**
 * Counters and answer of one selection run.
 */
typedef struct RoselReport {
  /**
   * 1-based input index of the k-th smallest element.
   */
  uint64_t answer_index;
  int64_t answer_value;
  uint64_t comparisons;
  uint64_t reads;
  uint64_t passes;
  uint64_t peak_workspace_bits;
  double elapsed_ms;
} RoselReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of this thread's most recent error, or NULL. Valid until
 * the next failing call on the same thread; do not free.
 */
const char *rosel_last_error(void);

/**
 * Builds an array from `len` values copied out of `values`.
 *
 * # Safety
 * `values` must point to at least `len` readable i64 values, and `out`
 * must be a valid location for the handle.
 */
enum RoselStatus rosel_array_from_values(const int64_t *values,
                                         size_t len,
                                         struct RoselArray **out);

/**
 * Loads a text file of newline-separated decimal integers.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid
 * location for the handle.
 */
enum RoselStatus rosel_array_load_text(const char *path, struct RoselArray **out);

/**
 * Loads a binary file of little-endian 64-bit integers.
 *
 * # Safety
 * As [`rosel_array_load_text`].
 */
enum RoselStatus rosel_array_load_binary(const char *path, struct RoselArray **out);

/**
 * Generates an input of `count` elements.
 *
 * # Safety
 * `out` must be a valid location for the handle.
 */
enum RoselStatus rosel_array_generate(size_t count,
                                      uint64_t seed,
                                      enum RoselDistribution distribution,
                                      struct RoselArray **out);

/**
 * Number of elements, or 0 for a NULL handle.
 *
 * # Safety
 * `array` must be a live handle from this library or NULL.
 */
size_t rosel_array_len(const struct RoselArray *array);

/**
 * Frees a handle. NULL is ignored.
 *
 * # Safety
 * `array` must be a handle from this library, not yet freed.
 */
void rosel_array_free(struct RoselArray *array);

/**
 * Runs a selection. `budget_bits = 0` means unlimited; a nonzero
 * budget is enforced bit for bit by the workspace meter.
 *
 * # Safety
 * `array` must be a live handle and `report` a valid location.
 */
enum RoselStatus rosel_select(const struct RoselArray *array,
                              uint64_t k,
                              enum RoselAlgorithm algorithm,
                              uint64_t budget_bits,
                              struct RoselReport *report);

/**
 * 1-based index of the k-th smallest per the sorting oracle, or 0 on
 * error. Verification helper; uses unrestricted memory.
 *
 * # Safety
 * `array` must be a live handle or NULL.
 */
uint64_t rosel_oracle_select(const struct RoselArray *array, uint64_t k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROSELECT_H */
