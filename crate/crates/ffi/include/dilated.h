#ifndef DILATED_H
#define DILATED_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DfStatus {
  DF_STATUS_OK = 0,
  DF_STATUS_NULL_POINTER = 1,
  DF_STATUS_DOMAIN = 2,
  DF_STATUS_OUT_OF_RANGE = 3,
  DF_STATUS_PARSE = 4,
  DF_STATUS_USAGE = 5,
  DF_STATUS_PRECONDITION = 6,
  DF_STATUS_NUMERIC = 7,
  DF_STATUS_DIMENSION = 8,
  DF_STATUS_PRECISION = 9,
  DF_STATUS_IO = 10,
  DF_STATUS_CONFIG = 11,
  DF_STATUS_UTF8 = 12,
  DF_STATUS_PANIC = 13,
} DfStatus;

/**
 * Arithmetic tables up to a fixed limit.
 */
typedef struct DfCache DfCache;

/**
 * Sorted set of positive integers.
 */
typedef struct DfIndexSet DfIndexSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes) and returns the full message
 * length. With `buf` NULL only the length is returned.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t df_last_error(char *buf, size_t len);

/**
 * # Safety
 * `out` must be writable.
 */
enum DfStatus df_cache_new(uint64_t limit, struct DfCache **out);

/**
 * # Safety
 * `cache` must be NULL or a handle from [`df_cache_new`] not yet freed.
 */
void df_cache_free(struct DfCache *cache);

/**
 * `sum_{d | n} d^alpha`.
 *
 * # Safety
 * `cache` must be a live handle and `out` writable.
 */
enum DfStatus df_sigma(const struct DfCache *cache, uint64_t n, double alpha, double *out);

/**
 * Jordan totient `J_eps(n)`.
 *
 * # Safety
 * `cache` must be a live handle and `out` writable.
 */
enum DfStatus df_jordan_totient(const struct DfCache *cache, uint64_t n, double eps, double *out);

/**
 * Riemann zeta at real `s > 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DfStatus df_zeta(double s, double *out);

/**
 * Builds a set from a sequence expression such as `"range[1,10]"` or
 * `"hadamard(2,20,1)"`.
 *
 * # Safety
 * `cache` must be a live handle, `spec` a NUL-terminated string and `out`
 * writable.
 */
enum DfStatus df_index_set_parse(const struct DfCache *cache,
                                 const char *spec,
                                 struct DfIndexSet **out);

/**
 * Builds a set from `len` integers; order and repeats do not matter.
 *
 * # Safety
 * `values` must point to `len` readable integers and `out` be writable.
 */
enum DfStatus df_index_set_from_array(const uint64_t *values, size_t len, struct DfIndexSet **out);

/**
 * # Safety
 * `set` must be NULL or a live handle.
 */
void df_index_set_free(struct DfIndexSet *set);

/**
 * Number of elements.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum DfStatus df_index_set_len(const struct DfIndexSet *set, size_t *out);

/**
 * Copies up to `cap` elements in increasing order into `buf`; `out_len`
 * receives the full size. `DF_STATUS_DIMENSION` when `cap` is too small.
 *
 * # Safety
 * `set` must be a live handle, `buf` writable for `cap` integers and
 * `out_len` writable.
 */
enum DfStatus df_index_set_elements(const struct DfIndexSet *set,
                                    uint64_t *buf,
                                    size_t cap,
                                    size_t *out_len);

/**
 * `sup_k theta_K(k)`.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum DfStatus df_theta_sup(const struct DfIndexSet *set, double *out);

/**
 * Smallest and largest eigenvalues of the GCD matrix of `set` at `s`.
 *
 * # Safety
 * `set` must be a live handle; `out_min` and `out_max` writable.
 */
enum DfStatus df_gcd_eigen_extremes(const struct DfIndexSet *set,
                                    double s,
                                    double *out_min,
                                    double *out_max);

/**
 * `‖sum_k c_k f(kx)‖²` for the power-law profile `a_j = j^{-s}`.
 *
 * # Safety
 * `set` must be a live handle, `coeffs` readable for `len` values and
 * `out` writable.
 */
enum DfStatus df_norm_sq_powerlaw(const struct DfIndexSet *set,
                                  const double *coeffs,
                                  size_t len,
                                  double s,
                                  double *out);

/**
 * `‖sum_k c_k f(kx)‖²` for `f = sum_j a_j e(jx)` with `nterms` explicit
 * `(freqs[i], amps[i])`, by exact frequency-collision counting.
 *
 * # Safety
 * `set` must be a live handle; `coeffs` readable for `len` values,
 * `freqs` and `amps` for `nterms` values; `out` writable.
 */
enum DfStatus df_norm_sq_explicit(const struct DfIndexSet *set,
                                  const double *coeffs,
                                  size_t len,
                                  const uint64_t *freqs,
                                  const double *amps,
                                  size_t nterms,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DILATED_H */
