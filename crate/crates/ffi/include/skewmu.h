#ifndef SKEWMU_H
#define SKEWMU_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SkewmuStatus {
  SKEWMU_STATUS_OK = 0,
  SKEWMU_STATUS_INVALID = 1,
  SKEWMU_STATUS_PRECISION = 2,
  SKEWMU_STATUS_BOUNDARY_AMBIGUOUS = 3,
  SKEWMU_STATUS_OUT_OF_RANGE = 4,
  SKEWMU_STATUS_INVALID_NUMERATION = 5,
  SKEWMU_STATUS_TOO_LARGE = 6,
  SKEWMU_STATUS_RATIONAL = 7,
  SKEWMU_STATUS_IO = 8,
  SKEWMU_STATUS_FORMAT = 9,
  SKEWMU_STATUS_NULL_POINTER = 10,
  SKEWMU_STATUS_BUFFER_TOO_SMALL = 11,
  SKEWMU_STATUS_PANIC = 12,
} SkewmuStatus;

/**
 * Continued-fraction data of `α`.
 */
typedef struct SkewmuCf SkewmuCf;

/**
 * A sieved table of `μ(n)`.
 */
typedef struct SkewmuMuTable SkewmuMuTable;

/**
 * A skew product `T(x, y) = (x + α, y + h(x))`.
 */
typedef struct SkewmuSystem SkewmuSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread (empty before any failure).
 * Successful calls leave it untouched; the pointer stays valid until the
 * next failing call on the same thread.
 */
const char *skewmu_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *skewmu_version(void);

/**
 * Builds a preset (`golden`, `silver`, `liouville-D`, `tower`) to the deepest
 * prefix of at most `depth` quotients certifiable at `bits`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out_cf` a valid pointer.
 */
enum SkewmuStatus skewmu_cf_from_preset(const char *name,
                                        size_t depth,
                                        uint32_t bits,
                                        struct SkewmuCf **out_cf);

/**
 * # Safety
 * `a` must point to `len` readable values and `out_cf` must be valid.
 */
enum SkewmuStatus skewmu_cf_from_quotients(const uint64_t *a,
                                           size_t len,
                                           uint32_t bits,
                                           struct SkewmuCf **out_cf);

/**
 * # Safety
 * `cf` must be null or a handle from this library not yet freed.
 */
void skewmu_cf_free(struct SkewmuCf *cf);

/**
 * Number of partial quotients; 0 for a null handle.
 *
 * # Safety
 * `cf` must be null or a live handle.
 */
size_t skewmu_cf_depth(const struct SkewmuCf *cf);

/**
 * Midpoint of the `α` enclosure.
 *
 * # Safety
 * `cf` must be a live handle and `out_alpha` valid.
 */
enum SkewmuStatus skewmu_cf_alpha(const struct SkewmuCf *cf, double *out_alpha);

/**
 * `a_k` for `1 ≤ k ≤ depth`.
 *
 * # Safety
 * `cf` must be a live handle and `out_a` valid.
 */
enum SkewmuStatus skewmu_cf_a(const struct SkewmuCf *cf, size_t k, uint64_t *out_a);

/**
 * `q_k` for `0 ≤ k ≤ depth + 1`.
 *
 * # Safety
 * `cf` must be a live handle and `out_q` valid.
 */
enum SkewmuStatus skewmu_cf_q(const struct SkewmuCf *cf, size_t k, uint64_t *out_q);

/**
 * Writes the digits `n_1, n_2, …` of `n` into `digits` (capacity `cap`) and
 * their count into `out_len`. With too small a buffer the call fails with
 * `BufferTooSmall` and `out_len` still receives the required length.
 *
 * # Safety
 * `digits` must have room for `cap` values; the other pointers must be valid.
 */
enum SkewmuStatus skewmu_ostrowski_encode(const struct SkewmuCf *cf,
                                          uint64_t n,
                                          int64_t *digits,
                                          size_t cap,
                                          size_t *out_len);

/**
 * Inverse of [`skewmu_ostrowski_encode`]; fails on an invalid numeration.
 *
 * # Safety
 * `digits` must point to `len` readable values; `out_n` must be valid.
 */
enum SkewmuStatus skewmu_ostrowski_decode(const struct SkewmuCf *cf,
                                          const int64_t *digits,
                                          size_t len,
                                          uint64_t *out_n);

/**
 * `r(n)`, the part of the numeration of `n` below index `k_minus`.
 *
 * # Safety
 * `cf` must be a live handle and `out_r` valid.
 */
enum SkewmuStatus skewmu_residue(const struct SkewmuCf *cf,
                                 uint64_t n,
                                 size_t k_minus,
                                 uint64_t *out_r);

/**
 * Coboundary system `h = g(x + α) − g(x) + c` with `ĝ(m_i) = re_i + i·im_i`
 * for the positive frequencies `m_i` (the conjugate modes are implied).
 * `cf` is copied, not consumed.
 *
 * # Safety
 * `m`, `re`, `im` must each point to `len` values; `cf` and `out_sys` valid.
 */
enum SkewmuStatus skewmu_system_coboundary(const struct SkewmuCf *cf,
                                           uint64_t tau_num,
                                           uint64_t tau_den,
                                           const int64_t *m,
                                           const double *re,
                                           const double *im,
                                           size_t len,
                                           double c,
                                           struct SkewmuSystem **out_sys);

/**
 * Synthetic `h` on the resonant frequencies of the first `depth` scales,
 * `|ĥ(m)| = amplitude·|m|^{−τ}` with seeded random phases and mean `mean`.
 *
 * # Safety
 * `cf` must be a live handle and `out_sys` valid.
 */
enum SkewmuStatus skewmu_system_synthetic(const struct SkewmuCf *cf,
                                          uint64_t tau_num,
                                          uint64_t tau_den,
                                          size_t depth,
                                          uint64_t seed,
                                          double amplitude,
                                          double mean,
                                          struct SkewmuSystem **out_sys);

/**
 * # Safety
 * `sys` must be null or a live handle.
 */
void skewmu_system_free(struct SkewmuSystem *sys);

/**
 * `H_n(x) = Σ_{l<n} h(x + lα)` from the closed form, with its error bound.
 *
 * # Safety
 * `sys` must be a live handle; `out_value` valid, `out_err` may be null.
 */
enum SkewmuStatus skewmu_birkhoff_sum(const struct SkewmuSystem *sys,
                                      double x,
                                      int64_t n,
                                      double *out_value,
                                      double *out_err);

/**
 * # Safety
 * `out_table` must be valid.
 */
enum SkewmuStatus skewmu_mu_sieve(size_t n, struct SkewmuMuTable **out_table);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
void skewmu_mu_free(struct SkewmuMuTable *t);

/**
 * `μ(n)`, or 0 outside `1..=limit` and for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
int8_t skewmu_mu_get(const struct SkewmuMuTable *t, size_t n);

/**
 * `|(1/N) Σ_{n ≤ N} μ(n) e(βn)|`.
 *
 * # Safety
 * `t` must be a live handle and `out_value` valid.
 */
enum SkewmuStatus skewmu_davenport_avg(const struct SkewmuMuTable *t,
                                       size_t n,
                                       double beta,
                                       double *out_value);

/**
 * `𝔼_{L<N} |𝔼_{n ≤ R} μ(L+n) e(βn)|`.
 *
 * # Safety
 * `t` must be a live handle and `out_value` valid.
 */
enum SkewmuStatus skewmu_short_interval_corr(const struct SkewmuMuTable *t,
                                             size_t n,
                                             size_t r,
                                             double beta,
                                             double *out_value);

/**
 * `|(1/N) Σ_{n ≤ N} μ(n) e(ζ₁x_n + ζ₂y_n)|` along the orbit of `(x, y)`.
 *
 * # Safety
 * Both handles must be live and `out_value` valid.
 */
enum SkewmuStatus skewmu_disjointness_stat(const struct SkewmuSystem *sys,
                                           const struct SkewmuMuTable *t,
                                           double x,
                                           double y,
                                           int64_t zeta1,
                                           uint64_t zeta2,
                                           size_t n,
                                           double *out_value);

/**
 * Runs one CLI subcommand with a configuration in the flat `key = value`
 * format (`config` may be null for defaults) and writes its reports to
 * `out_dir`.
 *
 * # Safety
 * `name` and `out_dir` must be NUL-terminated strings; `config` may be null.
 */
enum SkewmuStatus skewmu_run_experiment(const char *name, const char *config, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKEWMU_H */
