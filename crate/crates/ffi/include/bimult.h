#ifndef BIMULT_H
#define BIMULT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  BIMULT_STATUS_OK = 0,
  BIMULT_STATUS_SHAPE = 1,
  BIMULT_STATUS_INDEX_OUT_OF_RANGE = 2,
  BIMULT_STATUS_SVD_CONVERGENCE = 3,
  BIMULT_STATUS_EIG_CONVERGENCE = 4,
  BIMULT_STATUS_NOT_PSD = 5,
  BIMULT_STATUS_MODULARITY_METHOD_MISMATCH = 6,
  BIMULT_STATUS_INVALID_ARGUMENT = 7,
  BIMULT_STATUS_PARSE = 8,
  BIMULT_STATUS_NULL_POINTER = 9,
  BIMULT_STATUS_PANIC = 10,
} BimultStatus;

typedef enum {
  BIMULT_TARGET_S2 = 0,
  BIMULT_TARGET_B = 1,
  BIMULT_TARGET_S1 = 2,
} BimultTarget;

/**
 * Dense complex matrix.
 */
typedef struct BimultMatrix BimultMatrix;

/**
 * Schur symbol of dims `(d1, d2, d3)`.
 */
typedef struct BimultSchur BimultSchur;

/**
 * General trilinear symbol of dims `(d1, d2, d3)`.
 */
typedef struct BimultSymbol BimultSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bimult_last_error(void);

/**
 * Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
 *
 * # Safety
 * `data` must point to `2·rows·cols` readable doubles (may be NULL when
 * the matrix is empty). `out` must be writable.
 */
BimultStatus bimult_matrix_new(size_t rows, size_t cols, const double *data, BimultMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a handle from this library not yet freed.
 */
void bimult_matrix_free(BimultMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `rows` and `cols` must be writable.
 */
BimultStatus bimult_matrix_shape(const BimultMatrix *m, size_t *rows, size_t *cols);

/**
 * Copies the entries into `out`, which holds `len` doubles. `len` must be
 * at least `2·rows·cols`.
 *
 * # Safety
 * `m` must be a live handle and `out` must point to `len` writable doubles.
 */
BimultStatus bimult_matrix_data(const BimultMatrix *m, double *out, size_t len);

/**
 * Creates a Schur symbol from `2·d1·d2·d3` interleaved doubles indexed
 * `(t1, t2, t3)` row-major.
 *
 * # Safety
 * `dims` must point to three `size_t`; `data` to the entries; `out` must be writable.
 */
BimultStatus bimult_schur_new(const size_t *dims, const double *data, BimultSchur **out);

/**
 * # Safety
 * `s` must be NULL or a handle from this library not yet freed.
 */
void bimult_schur_free(BimultSchur *s);

/**
 * Creates a general symbol from `2·(d1·d2·d3)²` interleaved doubles indexed
 * `(a1, b1, a2, b2, a3, b3)` row-major.
 *
 * # Safety
 * Same contract as [`bimult_schur_new`].
 */
BimultStatus bimult_symbol_new(const size_t *dims, const double *data, BimultSymbol **out);

/**
 * # Safety
 * `s` must be NULL or a handle from this library not yet freed.
 */
void bimult_symbol_free(BimultSymbol *s);

/**
 * General symbol of a Schur symbol.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
BimultStatus bimult_schur_embed(const BimultSchur *s, BimultSymbol **out);

/**
 * `out = M_φ(y, x)` for a Schur symbol.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
BimultStatus bimult_apply_schur(const BimultSchur *s,
                                const BimultMatrix *y,
                                const BimultMatrix *x,
                                BimultMatrix **out);

/**
 * `out = τ_φ(y, x)` for a general symbol.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
BimultStatus bimult_apply_tau(const BimultSymbol *phi,
                              const BimultMatrix *y,
                              const BimultMatrix *x,
                              BimultMatrix **out);

/**
 * Factorization norm of `m`. `tol` must be at least 1e-10.
 *
 * # Safety
 * `m` must be a live handle; `value` must be writable.
 */
BimultStatus bimult_gamma2(const BimultMatrix *m, double tol, double *value);

/**
 * Lower bound for the norm of a Schur multiplier into `target`.
 *
 * # Safety
 * `s` must be a live handle; `value` must be writable.
 */
BimultStatus bimult_norm_schur(const BimultSchur *s,
                               BimultTarget target,
                               size_t restarts,
                               uint64_t seed,
                               double *value);

/**
 * Lower bound for the norm of a general multiplier into `target`.
 *
 * # Safety
 * `phi` must be a live handle; `value` must be writable.
 */
BimultStatus bimult_norm_tau(const BimultSymbol *phi,
                             BimultTarget target,
                             size_t restarts,
                             uint64_t seed,
                             double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIMULT_H */
