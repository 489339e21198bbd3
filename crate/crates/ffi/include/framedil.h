#ifndef FRAMEDIL_H
#define FRAMEDIL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FD_STATUS_OK = 0,
  FD_STATUS_NULL_POINTER = 1,
  FD_STATUS_INVALID_ARGUMENT = 2,
  FD_STATUS_SHAPE = 3,
  FD_STATUS_NOT_POSITIVE_DEFINITE = 4,
  FD_STATUS_NUMERICAL = 5,
  FD_STATUS_BUFFER_TOO_SMALL = 6,
  FD_STATUS_PANIC = 7,
} FdStatus;

typedef struct FdDilation FdDilation;

typedef struct FdFraming FdFraming;

typedef struct FdOperatorMap FdOperatorMap;

typedef struct FdPovm FdPovm;

typedef struct FdPvmDilation FdPvmDilation;

typedef struct {
  double rel;
  double abs;
} FdTolerance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on this thread.
 */
const char *fd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fd_version(void);

FdTolerance fd_tolerance_default(void);

/**
 * Framing of `len` pairs in `C^dim`. `g` and `h` each hold `len` vectors
 * of `dim` complex entries, one vector after another.
 *
 * # Safety
 * `g` and `h` are valid for `2·dim·len` doubles; `out` is writable.
 */
FdStatus fd_framing_new(size_t dim, size_t len, const double *g, const double *h, FdFraming **out);

/**
 * # Safety
 * `fr` is null or a live framing handle.
 */
void fd_framing_free(FdFraming *fr);

/**
 * Writes the `dim × dim` synthesis matrix `Σ h_n g_n*`.
 *
 * # Safety
 * `fr` is a live handle; `out` is valid for `out_len` doubles.
 */
FdStatus fd_framing_synthesis(const FdFraming *fr, double *out, size_t out_len);

/**
 * Dimension of `F_max`.
 *
 * # Safety
 * `fr` is a live handle; `dim_out` is writable.
 */
FdStatus fd_framing_fmax_dim(const FdFraming *fr, FdTolerance tol, size_t *dim_out);

/**
 * POVM with `atoms` outcomes on `C^dim`; `data` holds the atoms one after
 * another, each a row-major `dim × dim` matrix.
 *
 * # Safety
 * `data` is valid for `2·atoms·dim·dim` doubles; `out` is writable.
 */
FdStatus fd_povm_new(size_t dim, size_t atoms, const double *data, FdTolerance tol, FdPovm **out);

/**
 * # Safety
 * `p` is null or a live POVM handle.
 */
void fd_povm_free(FdPovm *p);

/**
 * Naimark dilation of a POVM.
 *
 * # Safety
 * `p` is a live handle; `out` is writable.
 */
FdStatus fd_naimark_dilate(const FdPovm *p, FdTolerance tol, FdPvmDilation **out);

/**
 * # Safety
 * `pd` is null or a live handle.
 */
void fd_pvm_free(FdPvmDilation *pd);

/**
 * Dimension of the dilation space `K`, or 0 for a null handle.
 *
 * # Safety
 * `pd` is null or a live handle.
 */
size_t fd_pvm_k_dim(const FdPvmDilation *pd);

/**
 * Writes the `k × k` projection `Φ(σ)` for the subset with bitmask `mask`.
 *
 * # Safety
 * `pd` is a live handle; `out` is valid for `out_len` doubles.
 */
FdStatus fd_pvm_projection(const FdPvmDilation *pd, size_t mask, double *out, size_t out_len);

/**
 * Writes `V`, a `k × dim` matrix with `φ(σ) = V*·Φ(σ)·V`.
 *
 * # Safety
 * `pd` is a live handle; `out` is valid for `out_len` doubles.
 */
FdStatus fd_pvm_v(const FdPvmDilation *pd, double *out, size_t out_len);

/**
 * Runs every projection-valued-measure check; `passed_out` receives the
 * verdict and `max_residual_out`, if not null, the largest residual.
 *
 * # Safety
 * `pd` is a live handle; `passed_out` is writable; `max_residual_out` is
 * null or writable.
 */
FdStatus fd_pvm_verify(const FdPvmDilation *pd,
                       FdTolerance tol,
                       bool *passed_out,
                       double *max_residual_out);

/**
 * Operator map from its JSON form
 * `{"semigroup": …, "dimF": …, "dimE": …, "phi": {…}}`.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
FdStatus fd_operator_map_from_json(const char *json, FdOperatorMap **out);

/**
 * # Safety
 * `om` is null or a live handle.
 */
void fd_operator_map_free(FdOperatorMap *om);

/**
 * Minimal dilation of a positive-definite operator map.
 *
 * # Safety
 * `om` is a live handle; `out` is writable.
 */
FdStatus fd_dilation_build(const FdOperatorMap *om, FdTolerance tol, FdDilation **out);

/**
 * # Safety
 * `dil` is null or a live handle.
 */
void fd_dilation_free(FdDilation *dil);

/**
 * Dimension of the dilation space, or 0 for a null handle.
 *
 * # Safety
 * `dil` is null or a live handle.
 */
size_t fd_dilation_rank(const FdDilation *dil);

/**
 * Writes the `r × r` matrix `Φ(u)`.
 *
 * # Safety
 * `dil` is a live handle; `out` is valid for `out_len` doubles.
 */
FdStatus fd_dilation_phi(const FdDilation *dil, size_t u, double *out, size_t out_len);

/**
 * Verifies the dilation identities; `passed_out` receives the verdict.
 *
 * # Safety
 * `dil` is a live handle; `passed_out` is writable.
 */
FdStatus fd_dilation_verify(const FdDilation *dil, FdTolerance tol, bool *passed_out);

/**
 * Runs a problem file given as JSON text, as the command line would.
 * `report_out` receives the JSON report (free with [`fd_string_free`]) and
 * `exit_code_out` the command-line exit code. Malformed input yields
 * [`FdStatus::InvalidArgument`], exit code 2 and no report.
 *
 * # Safety
 * `problem` is a NUL-terminated string; both outputs are writable.
 */
FdStatus fd_run_problem_json(const char *problem, char **report_out, int32_t *exit_code_out);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` is null or a string from [`fd_run_problem_json`] not yet freed.
 */
void fd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAMEDIL_H */
