#ifndef EXPSAMP_H
#define EXPSAMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result codes of the C interface.
 */
typedef enum ExpsampStatus {
  EXPSAMP_STATUS_OK = 0,
  EXPSAMP_STATUS_NULL_POINTER = 1,
  EXPSAMP_STATUS_INVALID_ARGUMENT = 2,
  EXPSAMP_STATUS_PARSE_ERROR = 3,
  EXPSAMP_STATUS_DOMAIN_ERROR = 4,
  EXPSAMP_STATUS_PRECONDITION_FAILED = 5,
  EXPSAMP_STATUS_MISSING_SAMPLE = 6,
  EXPSAMP_STATUS_BUFFER_TOO_SMALL = 7,
  EXPSAMP_STATUS_INTERNAL = 8,
  EXPSAMP_STATUS_PANIC = 9,
} ExpsampStatus;

/*
 Opaque kernel handle. Create with `expsamp_kernel_new`, release with
 `expsamp_kernel_free`.
 */
typedef struct ExpsampKernel ExpsampKernel;

/*
 Real function evaluated by the operator: `f(x, user_data)`.
 */
typedef double (*ExpsampFunction)(double x, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a kernel spec such as `bspline:4` or `combo:4:e^1:e^2` and
 stores a new handle in `*out`.

 # Safety
 `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ExpsampStatus expsamp_kernel_new(const char *spec, struct ExpsampKernel **out);

/*
 Releases a handle. Null is accepted and ignored.

 # Safety
 `kernel` must come from `expsamp_kernel_new` and not be used afterwards.
 */
void expsamp_kernel_free(struct ExpsampKernel *kernel);

/*
 Kernel value at `u > 0`.

 # Safety
 `kernel` must be a live handle and `out` a valid pointer.
 */
enum ExpsampStatus expsamp_kernel_eval(const struct ExpsampKernel *kernel, double u, double *out);

/*
 Support of the kernel in the logarithmic variable.

 # Safety
 `kernel` must be a live handle; `lo` and `hi` valid pointers.
 */
enum ExpsampStatus expsamp_kernel_log_support(const struct ExpsampKernel *kernel,
                                              double *lo,
                                              double *hi);

/*
 Discrete algebraic moment `m_nu(chi, u)`.

 # Safety
 `kernel` must be a live handle and `out` a valid pointer.
 */
enum ExpsampStatus expsamp_kernel_algebraic_moment(const struct ExpsampKernel *kernel,
                                                   uintptr_t nu,
                                                   double u,
                                                   double *out);

/*
 Absolute moment `M_nu(chi)`, the supremum over `u`.

 # Safety
 `kernel` must be a live handle and `out` a valid pointer.
 */
enum ExpsampStatus expsamp_kernel_absolute_moment(const struct ExpsampKernel *kernel,
                                                  uintptr_t nu,
                                                  double *out);

/*
 Range of cell indices `k_min..=k_max` whose means are needed to evaluate
 the operator at every point of `xs`.

 # Safety
 `xs` must point to `len` values; `k_min` and `k_max` valid pointers.
 */
enum ExpsampStatus expsamp_sample_window(const struct ExpsampKernel *kernel,
                                         double w,
                                         const double *xs,
                                         uintptr_t len,
                                         int64_t *k_min,
                                         int64_t *k_max);

/*
 Operator value at `x` from precomputed cell means: `means[j]` is the mean
 of `f(e^u)` over `[(k_min + j)/w, (k_min + j + 1)/w]`.

 # Safety
 `means` must point to `len` values and `out` be a valid pointer.
 */
enum ExpsampStatus expsamp_apply_samples(const struct ExpsampKernel *kernel,
                                         double w,
                                         int64_t k_min,
                                         const double *means,
                                         uintptr_t len,
                                         double x,
                                         double *out);

/*
 `sum_i c_i (I_{iw} f)(x)` with the order-raising coefficients for `p`
 (`p = 1` is the plain operator). Cell means are computed with
 `quad_nodes` Gauss-Legendre nodes (0 selects the default). For `p > 1`
 the callback may run concurrently on several threads.

 # Safety
 `f` must be safe to call with `user_data`; `out` must be valid.
 */
enum ExpsampStatus expsamp_apply_function(const struct ExpsampKernel *kernel,
                                          ExpsampFunction f,
                                          void *user_data,
                                          double w,
                                          uintptr_t p,
                                          uintptr_t quad_nodes,
                                          double x,
                                          double *out);

/*
 Exact coefficients `c_i = numerators[i] / denominators[i]` of the
 `p`-term order-raising combination. `capacity` is the length of both
 arrays and must be at least `p`.

 # Safety
 Both arrays must hold `capacity` elements.
 */
enum ExpsampStatus expsamp_combination_coefficients(uintptr_t p,
                                                    int64_t *numerators,
                                                    int64_t *denominators,
                                                    uintptr_t capacity);

/*
 Message for the most recent failure on this thread, or an empty string.
 Valid until the next call into the library on the same thread.
 */
const char *expsamp_last_error_message(void);

/*
 Static description of a status code.
 */
const char *expsamp_status_name(enum ExpsampStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPSAMP_H */
