#ifndef SIEGEL_MODULI_H
#define SIEGEL_MODULI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Library errors map one to one onto the codes from
 `SM_STATUS_NOT_POSITIVE_DEFINITE` on.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_UTF8 = 2,
  SM_STATUS_INVALID_JSON = 3,
  SM_STATUS_NOT_POSITIVE_DEFINITE = 10,
  SM_STATUS_ORDER_MISMATCH = 11,
  SM_STATUS_NOT_SYMMETRIC = 12,
  SM_STATUS_MALFORMED_MATRIX = 13,
  SM_STATUS_NOT_SYMPLECTIC = 14,
  SM_STATUS_SINGULAR_DENOMINATOR = 15,
  SM_STATUS_GENUS_MISMATCH = 16,
  SM_STATUS_ITERATION_LIMIT_EXCEEDED = 17,
  SM_STATUS_UNSUPPORTED = 18,
  SM_STATUS_NOT_STANDARD_POSITION = 19,
  SM_STATUS_INVALID_INDEX_SET = 20,
  SM_STATUS_INVALID_CURVE = 21,
  SM_STATUS_RIEMANN_RELATION_VIOLATION = 22,
  SM_STATUS_QUADRATURE_NON_CONVERGENCE = 23,
  SM_STATUS_QUERY_TOO_CLOSE_TO_BRANCH_POINT = 24,
  SM_STATUS_INVALID_FAMILY = 25,
  SM_STATUS_INCONCLUSIVE = 26,
  SM_STATUS_INVALID_CONFIG = 27,
  SM_STATUS_INTERNAL = 28,
  SM_STATUS_PANIC = 99,
} SmStatus;

/*
 A hyperelliptic curve given by its branch points.
 */
typedef struct SmCurve SmCurve;

/*
 A point of a Siegel upper half space.
 */
typedef struct SmPoint SmPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into the library on the same thread.
 */
const char *sm_last_error_message(void);

/*
 Frees a string returned by the library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void sm_string_free(char *s);

/*
 Point of genus `g` from row-major `g x g` arrays `x` and `y`.

 # Safety
 `x` and `y` must hold `g * g` doubles; `out` must be writable.
 */
enum SmStatus sm_point_new(size_t g, const double *x, const double *y, struct SmPoint **out);

/*
 Point from JSON `{"g", "X", "Y"}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SmStatus sm_point_from_json(const char *json, struct SmPoint **out);

/*
 Releases a point. Null is ignored.

 # Safety
 `p` must come from this library and not be freed twice.
 */
void sm_point_free(struct SmPoint *p);

/*
 Genus of a point, 0 for null.

 # Safety
 `p` must be null or a live point.
 */
size_t sm_point_genus(const struct SmPoint *p);

/*
 Copies `X` and `Y` row-major into buffers of `g * g` doubles.

 # Safety
 `p` must be live; `x` and `y` must hold `g * g` doubles.
 */
enum SmStatus sm_point_matrices(const struct SmPoint *p, double *x, double *y);

/*
 JSON text of a point; free with [`sm_string_free`].

 # Safety
 `p` must be live; `out` must be writable.
 */
enum SmStatus sm_point_to_json(const struct SmPoint *p, char **out);

/*
 Invariant distance. Points of different genera are compared in the
 larger genus.

 # Safety
 `a`, `b` must be live; `out` must be writable.
 */
enum SmStatus sm_distance(const struct SmPoint *a, const struct SmPoint *b, double *out);

/*
 Siegel-reduced representative as a new point.

 # Safety
 `p` must be live; `out` must be writable.
 */
enum SmStatus sm_reduce(const struct SmPoint *p, struct SmPoint **out);

/*
 Point padded to `target_genus`.

 # Safety
 `p` must be live; `out` must be writable.
 */
enum SmStatus sm_embed(const struct SmPoint *p, size_t target_genus, struct SmPoint **out);

/*
 Curve from `n` real branch points.

 # Safety
 `points` must hold `n` doubles; `out` must be writable.
 */
enum SmStatus sm_curve_new(const double *points, size_t n, struct SmCurve **out);

/*
 Releases a curve. Null is ignored.

 # Safety
 `c` must come from this library and not be freed twice.
 */
void sm_curve_free(struct SmCurve *c);

/*
 Normalized period matrix, or its Siegel-reduced form when `reduced` is
 nonzero.

 # Safety
 `c` must be live; `out` must be writable.
 */
enum SmStatus sm_period_matrix(const struct SmCurve *c, bool reduced, struct SmPoint **out);

/*
 Volume of `A_g`: nested quadrature when `quadrature` is set (genus 1),
 otherwise Monte Carlo with `n` proposals.

 # Safety
 `estimate` and `stderr` must be writable.
 */
enum SmStatus sm_volume(size_t g,
                        bool quadrature,
                        size_t n,
                        uint64_t seed,
                        size_t workers,
                        double *estimate,
                        double *stderr);

/*
 Boundary strata of genus `g` as a JSON array of descriptors; free with
 [`sm_string_free`].

 # Safety
 `out` must be writable.
 */
enum SmStatus sm_strata_json(size_t g, bool include_interior, char **out);

/*
 Library version, static.
 */
const char *sm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEGEL_MODULI_H */
