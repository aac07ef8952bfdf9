#ifndef TRICONST_H
#define TRICONST_H

/* Generated by cbindgen from crates/triconst-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TriconstStatus {
  TRICONST_STATUS_OK = 0,
  TRICONST_STATUS_NULL_POINTER = 1,
  TRICONST_STATUS_INVALID_UTF8 = 2,
  TRICONST_STATUS_PARSE = 3,
  TRICONST_STATUS_DEGENERATE = 4,
  TRICONST_STATUS_INVALID_ARGUMENT = 5,
  TRICONST_STATUS_NOT_POSITIVE_DEFINITE = 6,
  TRICONST_STATUS_INTERNAL = 7,
  TRICONST_STATUS_IO = 8,
  TRICONST_STATUS_PANIC = 9,
} TriconstStatus;

/**
 * Which verification grid a threshold belongs to.
 */
typedef enum TriconstMode {
  /**
   * The regular `(a, b)` grid, j = 1..4.
   */
  TRICONST_MODE_THM61 = 0,
  /**
   * The small-`b` grid at `b = 1/10`, j = 1..3.
   */
  TRICONST_MODE_THM62 = 1,
} TriconstMode;

/**
 * An exactly assembled matrix pencil `(A, B)`.
 */
typedef struct TriconstPencil TriconstPencil;

/**
 * The result of a verification sweep.
 */
typedef struct TriconstReport TriconstReport;

/**
 * A triangle shape `T_{a,b}` with exact rational parameters.
 */
typedef struct TriconstShape TriconstShape;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *triconst_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *triconst_last_error(void);

/**
 * Static description of a status code.
 */
const char *triconst_status_message(enum TriconstStatus status);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void triconst_string_free(char *s);

/**
 * Creates `T_{a,b}` from exact rationals written as `"p/q"` or decimals.
 *
 * # Safety
 * `a`, `b` must be NUL-terminated strings; `out` must be writable.
 */
enum TriconstStatus triconst_shape_new(const char *a, const char *b, struct TriconstShape **out);

/**
 * Creates the canonical shape of the triangle with vertices
 * `(xy[0], xy[1]), (xy[2], xy[3]), (xy[4], xy[5])` (doubles taken exactly).
 *
 * # Safety
 * `xy` must point to six doubles; `out` must be writable.
 */
enum TriconstStatus triconst_shape_from_vertices(const double *xy, struct TriconstShape **out);

/**
 * Releases a shape. NULL is ignored.
 *
 * # Safety
 * `shape` must come from this library and not be freed twice.
 */
void triconst_shape_free(struct TriconstShape *shape);

/**
 * Nearest doubles of the shape parameters.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_shape_params(const struct TriconstShape *shape, double *a, double *b);

/**
 * Closed-form bound `K_j(T_{a,b})`, j = 1..4.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_k_constant(const struct TriconstShape *shape, uint32_t j, double *out);

/**
 * Circumradius of `T_{a,b}`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_circumradius(const struct TriconstShape *shape, double *out);

/**
 * Floating-point upper bound `C̄_j⁽ⁿ⁾(T_{a,b})`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_upper_bound(const struct TriconstShape *shape,
                                         uint32_t j,
                                         size_t n,
                                         double *out);

/**
 * Lower estimate `C̃_j(T_{a,b})` over polynomials of the given degree.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_lower_bound(const struct TriconstShape *shape,
                                         uint32_t j,
                                         uint32_t degree,
                                         double *out);

/**
 * Assembles the level-`n` pencil of `C_j` exactly.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_pencil_new(const struct TriconstShape *shape,
                                        uint32_t j,
                                        size_t n,
                                        struct TriconstPencil **out);

/**
 * Releases a pencil. NULL is ignored.
 *
 * # Safety
 * `pencil` must come from this library and not be freed twice.
 */
void triconst_pencil_free(struct TriconstPencil *pencil);

/**
 * Matrix order of the pencil (0 for NULL).
 *
 * # Safety
 * `pencil` must be NULL or valid.
 */
size_t triconst_pencil_dim(const struct TriconstPencil *pencil);

/**
 * Floating-point `λ_max(A, B)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_pencil_max_eigenvalue(const struct TriconstPencil *pencil,
                                                   double *out);

/**
 * Sets `*verified` to whether `λB − A` was proven positive definite for the
 * exact rational `lambda` (`"p/q"` or decimal). `false` means "not
 * certified", not "false".
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_pencil_certify(const struct TriconstPencil *pencil,
                                            const char *lambda,
                                            bool *verified);

/**
 * Exact certification threshold as a newly allocated `"p/q"` string.
 *
 * # Safety
 * Pointers must be valid; release `*out` with [`triconst_string_free`].
 */
enum TriconstStatus triconst_lambda_threshold(const struct TriconstShape *shape,
                                              uint32_t j,
                                              size_t n,
                                              enum TriconstMode mode,
                                              char **out);

/**
 * Certifies one grid point at its threshold.
 *
 * # Safety
 * Pointers must be valid.
 */
enum TriconstStatus triconst_verify_point(const struct TriconstShape *shape,
                                          uint32_t j,
                                          size_t n,
                                          enum TriconstMode mode,
                                          bool *verified);

/**
 * Runs a sweep. `js` lists the constants (`nj` entries). A NULL `ks` or
 * `ls` selects the whole range; a non-NULL pointer with length 0 selects
 * nothing. `threads == 0` uses the default pool.
 *
 * # Safety
 * Array pointers must hold the stated number of elements; `out` must be
 * writable.
 */
enum TriconstStatus triconst_sweep_run(enum TriconstMode mode,
                                       const uint32_t *js,
                                       size_t nj,
                                       size_t n,
                                       const size_t *ks,
                                       size_t nk,
                                       const size_t *ls,
                                       size_t nl,
                                       size_t threads,
                                       struct TriconstReport **out);

/**
 * Releases a report. NULL is ignored.
 *
 * # Safety
 * `report` must come from this library and not be freed twice.
 */
void triconst_report_free(struct TriconstReport *report);

/**
 * Point counts of a report; any out-pointer may be NULL.
 *
 * # Safety
 * `report` must be valid.
 */
enum TriconstStatus triconst_report_counts(const struct TriconstReport *report,
                                           size_t *total,
                                           size_t *verified,
                                           size_t *pending);

/**
 * The report as JSON in a newly allocated string.
 *
 * # Safety
 * Pointers must be valid; release `*out` with [`triconst_string_free`].
 */
enum TriconstStatus triconst_report_json(const struct TriconstReport *report, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRICONST_H */
