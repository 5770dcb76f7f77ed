#ifndef FLASH_FFI_H
#define FLASH_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FlashStatus {
  FLASH_STATUS_OK = 0,
  FLASH_STATUS_NULL_POINTER = 1,
  FLASH_STATUS_INVALID_ARGUMENT = 2,
  FLASH_STATUS_PARSE = 3,
  FLASH_STATUS_IO = 4,
  FLASH_STATUS_LENGTH_MISMATCH = 5,
  FLASH_STATUS_NON_FINITE = 6,
  FLASH_STATUS_BUFFER_TOO_SMALL = 7,
  FLASH_STATUS_INTERNAL = 8,
} FlashStatus;

/**
 * Values accepted wherever a function takes an algorithm code.
 */
typedef enum FlashAlgorithm {
  FLASH_ALGORITHM_FLASH = 0,
  FLASH_ALGORITHM_SWAY = 1,
  FLASH_ALGORITHM_NSGA2 = 2,
  FLASH_ALGORITHM_RANDOM = 3,
} FlashAlgorithm;

/**
 * Values accepted wherever a function takes objective senses.
 */
typedef enum FlashSense {
  FLASH_SENSE_MINIMIZE = 0,
  FLASH_SENSE_MAXIMIZE = 1,
} FlashSense;

/**
 * Opaque problem handle.
 */
typedef struct FlashProblem FlashProblem;

/**
 * Opaque run result handle.
 */
typedef struct FlashRun FlashRun;

/**
 * Settings for [`flash_run`]. Start from [`flash_run_params_default`].
 */
typedef struct FlashRunParams {
  /**
   * Candidate pool size; capped at the table size for tabular problems.
   */
  size_t pool;
  uint64_t seed;
  size_t size0;
  size_t lives;
  size_t pop_size;
  size_t generations;
  /**
   * Evaluations for random search; must be at least 1 for that algorithm.
   */
  size_t random_budget;
} FlashRunParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *flash_last_error(void);

/**
 * Loads a tabular problem from a CSV file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlashStatus flash_problem_load_tabular(const char *path, struct FlashProblem **out);

/**
 * Builds a built-in synthetic problem (`line`, `sphere2` or `step`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlashStatus flash_problem_synthetic(const char *name, size_t rows, struct FlashProblem **out);

/**
 * Generates a next-release planning problem.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FlashStatus flash_problem_monrp(size_t requirements,
                                     size_t releases,
                                     size_t clients,
                                     double dep_pct,
                                     double funding_pct,
                                     uint64_t seed,
                                     struct FlashProblem **out);

/**
 * # Safety
 * `problem` must come from a `flash_problem_*` constructor and not have
 * been freed. Null is ignored.
 */
void flash_problem_free(struct FlashProblem *problem);

/**
 * Number of decision variables; 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t flash_problem_decision_count(const struct FlashProblem *problem);

/**
 * Number of objectives; 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t flash_problem_objective_count(const struct FlashProblem *problem);

struct FlashRunParams flash_run_params_default(void);

/**
 * Runs one optimizer on a fresh copy of `problem`. `algorithm` is a
 * [`FlashAlgorithm`] value.
 *
 * # Safety
 * `problem` must be a live handle, `params` null (defaults) or valid, and
 * `out` a valid pointer.
 */
enum FlashStatus flash_run(const struct FlashProblem *problem,
                           int32_t algorithm,
                           const struct FlashRunParams *params,
                           struct FlashRun **out);

/**
 * # Safety
 * `run` must come from [`flash_run`] and not have been freed. Null is
 * ignored.
 */
void flash_run_free(struct FlashRun *run);

/**
 * Evaluations used by the run; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t flash_run_evals(const struct FlashRun *run);

/**
 * Size of the run's final non-dominated set; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t flash_run_best_count(const struct FlashRun *run);

/**
 * Copies the best set's objectives row by row into `buffer`, which must
 * hold `best_count × objective_count` values.
 *
 * # Safety
 * `run` must be a live handle and `buffer` valid for `len` writes.
 */
enum FlashStatus flash_run_best_objectives(const struct FlashRun *run, double *buffer, size_t len);

/**
 * Pareto domination of `x` over `y`. `senses` holds [`FlashSense`] codes.
 *
 * # Safety
 * `x`, `y` and `senses` must each be valid for `n` reads; `out` valid.
 */
enum FlashStatus flash_binary_dominates(const double *x,
                                        const double *y,
                                        const int32_t *senses,
                                        size_t n,
                                        bool *out);

/**
 * The exponential quality indicator `M(x, y)`.
 *
 * # Safety
 * `x`, `y` and `senses` must each be valid for `n` reads; `out` valid.
 */
enum FlashStatus flash_indicator_value(const double *x,
                                       const double *y,
                                       const int32_t *senses,
                                       size_t n,
                                       double *out);

/**
 * Vargha-Delaney A12 of `xs` over `ys`.
 *
 * # Safety
 * `xs` must be valid for `nx` reads, `ys` for `ny`; `out` valid.
 */
enum FlashStatus flash_a12(const double *xs, size_t nx, const double *ys, size_t ny, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLASH_FFI_H */
