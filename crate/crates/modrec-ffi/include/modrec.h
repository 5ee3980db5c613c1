/* C ABI for the modrec modulo-sample recovery pipeline. */

#ifndef MODREC_H
#define MODREC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum ModrecStatus {
  MODREC_STATUS_OK = 0,
  MODREC_STATUS_NULL_POINTER = 1,
  MODREC_STATUS_INVALID_ARGUMENT = 2,
  // The local-polynomial moment matrix fell below its eigenvalue floor.
  MODREC_STATUS_ILL_CONDITIONED = 3,
  // Too few samples for the requested interpolation degree.
  MODREC_STATUS_INSUFFICIENT_SAMPLES = 4,
} ModrecStatus;

// Kernel selector for the local-polynomial denoiser.
typedef enum ModrecKernel {
  MODREC_KERNEL_EPANECHNIKOV = 0,
  MODREC_KERNEL_BOX = 1,
  MODREC_KERNEL_TRIANGULAR = 2,
} ModrecKernel;

// Opaque handle to a recovered continuous function on [0, 1].
typedef struct ModrecRecovered ModrecRecovered;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the underlying library; static storage, do not free.
const char *modrec_version(void);

// Neighbor-count rule `k = ceil(0.09 n^(2/3) (ln n)^(1/3))`, clamped to
// `1..=n`; returns 0 only for `n = 0`.
size_t modrec_knn_auto_k(size_t n);

// Bandwidth rule `const * (ln n / n)^(beta/(2 beta + 1))`; NaN for n < 2.
double modrec_practical_bandwidth(double constant, double beta, size_t n);

// Local-polynomial denoising of `n` modulo-1 samples (values outside
// `[0, 1)` are reduced). Writes `n` fractional phases to `out_phases`;
// `out_min_eig` (optional) receives the smallest moment-matrix eigenvalue.
//
// # Safety
// `y` must point to `n` readable doubles and `out_phases` to `n` writable
// doubles; `out_min_eig` must be null or point to a writable double.
enum ModrecStatus modrec_lp_denoise(const double *y,
                                    size_t n,
                                    uint32_t order,
                                    double bandwidth,
                                    enum ModrecKernel kernel,
                                    double min_eig_floor,
                                    double *out_phases,
                                    double *out_min_eig);

// k-nearest-neighbor denoising of `n` modulo-1 samples; `k = 0` selects the
// automatic rule. Writes `n` fractional phases to `out_phases`.
//
// # Safety
// `y` must point to `n` readable doubles and `out_phases` to `n` writable
// doubles.
enum ModrecStatus modrec_knn_denoise(const double *y, size_t n, size_t k, double *out_phases);

// Sequential unwrapping of `n` fractional phases (all in `[0, 1)`) into
// real-valued samples, written to `out_values`.
//
// # Safety
// `phases` must point to `n` readable doubles and `out_values` to `n`
// writable doubles.
enum ModrecStatus modrec_unwrap(const double *phases, size_t n, double *out_values);

// Builds the continuous estimate from `n` unwrapped samples on the uniform
// grid `x_i = i/n` and stores an owned handle in `*out`.
//
// # Safety
// `values` must point to `n` readable doubles; `out` must be a valid
// non-null destination for the handle pointer.
enum ModrecStatus modrec_recover_build(const double *values,
                                       size_t n,
                                       size_t degree,
                                       struct ModrecRecovered **out);

// Evaluates a recovered function at `x` in [0, 1].
//
// # Safety
// `rec` must be a live handle from [`modrec_recover_build`] or
// [`modrec_lp_pipeline`]; `out` must point to a writable double.
enum ModrecStatus modrec_recovered_eval(const struct ModrecRecovered *rec, double x, double *out);

// Evaluates a recovered function at `len` abscissae.
//
// # Safety
// `rec` must be a live handle; `xs` must point to `len` readable doubles in
// [0, 1] and `out` to `len` writable doubles.
enum ModrecStatus modrec_recovered_eval_many(const struct ModrecRecovered *rec,
                                             const double *xs,
                                             size_t len,
                                             double *out);

// Releases a handle returned by [`modrec_recover_build`] or
// [`modrec_lp_pipeline`]. Null is a no-op.
//
// # Safety
// `rec` must be a pointer previously returned by this library and not yet
// freed.
void modrec_recovered_free(struct ModrecRecovered *rec);

// One-shot pipeline: lp-denoise `n` modulo samples, unwrap, and build the
// continuous estimate. `out_unwrapped` (optional) receives the `n`
// unwrapped sample estimates; `out` (optional) receives the function
// handle.
//
// # Safety
// `y` must point to `n` readable doubles; `out_unwrapped` must be null or
// point to `n` writable doubles; `out` must be null or a valid destination
// for the handle pointer.
enum ModrecStatus modrec_lp_pipeline(const double *y,
                                     size_t n,
                                     uint32_t order,
                                     double bandwidth,
                                     enum ModrecKernel kernel,
                                     double min_eig_floor,
                                     size_t qi_degree,
                                     double *out_unwrapped,
                                     struct ModrecRecovered **out);

// Seed-mixing rule used by sweeps (exposed so bindings can reproduce CSV
// rows exactly).
uint64_t modrec_derive_run_seed(uint64_t base_seed, size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODREC_H */
