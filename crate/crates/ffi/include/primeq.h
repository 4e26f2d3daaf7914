#ifndef PRIMEQ_H
#define PRIMEQ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of a library call.
typedef enum PrimeqStatus {
  PRIMEQ_STATUS_OK = 0,
  // A required pointer argument was null.
  PRIMEQ_STATUS_NULL_POINTER = 1,
  // An argument is outside the domain of the operation.
  PRIMEQ_STATUS_INVALID_ARGUMENT = 2,
  // The frequency is degenerate or the linear solve failed.
  PRIMEQ_STATUS_SOLVER = 3,
  // The caller's buffer is shorter than the data.
  PRIMEQ_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal panic was caught at the boundary.
  PRIMEQ_STATUS_PANIC = 5,
} PrimeqStatus;

// Profile selector for [`primeq_solution_profile`].
typedef enum PrimeqField {
  PRIMEQ_FIELD_U = 0,
  PRIMEQ_FIELD_V = 1,
  PRIMEQ_FIELD_THETA = 2,
} PrimeqField;

// Solution of one `(i tau, zeta)` problem.
typedef struct PrimeqModeSolution PrimeqModeSolution;

// Physical constants `a, nu, alpha, beta, gamma`.
typedef struct PrimeqParams PrimeqParams;

// A double-precision complex number, layout-compatible with C99
// `double _Complex`.
typedef struct PrimeqComplex {
  double re;
  double im;
} PrimeqComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *primeq_version(void);

// Message of the last failed call on this thread, or null when the last
// call succeeded. The pointer stays valid until the next library call on
// this thread.
const char *primeq_last_error(void);

// Validated parameters; free with [`primeq_params_free`].
//
// # Safety
// `out` must be valid for a pointer write.
enum PrimeqStatus primeq_params_new(double a,
                                    double nu,
                                    double alpha,
                                    double beta,
                                    double gamma,
                                    struct PrimeqParams **out);

// The defaults `a = 1, nu = 0.1, alpha = beta = gamma = 1`.
//
// # Safety
// `out` must be valid for a pointer write.
enum PrimeqStatus primeq_params_default(struct PrimeqParams **out);

// # Safety
// `params` is null or was returned by this library and not yet freed.
void primeq_params_free(struct PrimeqParams *params);

// `||f||_{sigma, zeta}` of a profile of order `k`.
//
// # Safety
// `params` is a live handle, `coeffs` holds `k` values and `out` is writable.
enum PrimeqStatus primeq_sobolev_norm(const struct PrimeqParams *params,
                                      const struct PrimeqComplex *coeffs,
                                      uintptr_t k,
                                      double sigma,
                                      int64_t xi,
                                      int64_t eta,
                                      double *out);

// `M_sigma` at `lambda = i tau`.
//
// # Safety
// `params` is a live handle and `out` is writable.
enum PrimeqStatus primeq_m_sigma(const struct PrimeqParams *params,
                                 double sigma,
                                 double tau,
                                 int64_t xi,
                                 int64_t eta,
                                 double *out);

// `int_0^a (omega^2 - nu d_zz)^{-1}[1] dz` at `lambda = i tau`, in closed form.
//
// # Safety
// `params` is a live handle and `out` is writable.
enum PrimeqStatus primeq_inverse_integral_one(const struct PrimeqParams *params,
                                              double tau,
                                              int64_t xi,
                                              int64_t eta,
                                              struct PrimeqComplex *out);

// Counter-example multiplier `m(tau)` for `alpha` in `(-1, 0)`.
//
// # Safety
// `params` is a live handle and `out` is writable.
enum PrimeqStatus primeq_counterexample_multiplier(const struct PrimeqParams *params,
                                                   double tau,
                                                   double alpha,
                                                   struct PrimeqComplex *out);

// Solve one mode at `lambda = i tau` with forcing `(f1, f2, f3)` of order
// `k`; free the result with [`primeq_solution_free`].
//
// # Safety
// `params` is a live handle, each of `f1`, `f2`, `f3` holds `k` values and
// `out` is valid for a pointer write.
enum PrimeqStatus primeq_solve_mode(const struct PrimeqParams *params,
                                    double tau,
                                    int64_t xi,
                                    int64_t eta,
                                    uintptr_t k,
                                    const struct PrimeqComplex *f1,
                                    const struct PrimeqComplex *f2,
                                    const struct PrimeqComplex *f3,
                                    struct PrimeqModeSolution **out);

// Truncation order of a solution, 0 for null.
//
// # Safety
// `sol` is null or a live handle.
uintptr_t primeq_solution_order(const struct PrimeqModeSolution *sol);

// Copy the profile selected by `field`, a [`PrimeqField`] value, into
// `buf`, which must hold at least the order.
//
// # Safety
// `sol` is a live handle and `buf` is valid for `len` writes.
enum PrimeqStatus primeq_solution_profile(const struct PrimeqModeSolution *sol,
                                          int32_t field,
                                          struct PrimeqComplex *buf,
                                          uintptr_t len);

// Trace constant `p0` of the pressure.
//
// # Safety
// `sol` is a live handle and `out` is writable.
enum PrimeqStatus primeq_solution_pressure_constant(const struct PrimeqModeSolution *sol,
                                                    struct PrimeqComplex *out);

// Forward residual norm and `|int_0^a (i xi u + i eta v) dz|`.
//
// # Safety
// `sol` is a live handle; `residual` and `divergence` are writable.
enum PrimeqStatus primeq_solution_diagnostics(const struct PrimeqModeSolution *sol,
                                              double *residual,
                                              double *divergence);

// # Safety
// `sol` is null or was returned by this library and not yet freed.
void primeq_solution_free(struct PrimeqModeSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRIMEQ_H */
