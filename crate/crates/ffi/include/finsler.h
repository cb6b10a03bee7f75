#ifndef FINSLER_H
#define FINSLER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum FslStatus {
  FSL_STATUS_OK = 0,
  FSL_STATUS_NULL_POINTER = 1,
  FSL_STATUS_INVALID_ARGUMENT = 2,
  FSL_STATUS_CONFIG = 3,
  FSL_STATUS_PARSE = 4,
  FSL_STATUS_DOMAIN = 5,
  FSL_STATUS_ORDER = 6,
  FSL_STATUS_NUMERIC = 7,
  FSL_STATUS_STRUCTURE_INVALID = 8,
  FSL_STATUS_DEGENERATE_FLAG = 9,
  FSL_STATUS_PANIC = 10,
} FslStatus;

/**
 * Opaque Finsler structure.
 */
typedef struct FslStructure FslStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fsl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fsl_version(void);

/**
 * Builds a structure from a TOML table describing the family, e.g.
 * `family = "randers"` with `alpha` and `beta` keys.
 *
 * # Safety
 * `family_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FslStatus fsl_structure_from_toml(size_t dimension,
                                       const char *family_toml,
                                       struct FslStructure **out);

/**
 * As [`fsl_structure_from_toml`] with a JSON object.
 *
 * # Safety
 * `family_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FslStatus fsl_structure_from_json(size_t dimension,
                                       const char *family_json,
                                       struct FslStructure **out);

/**
 * Releases a structure. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fsl_structure_free(struct FslStructure *s);

/**
 * Dimension of the structure, 0 for null.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t fsl_structure_dimension(const struct FslStructure *s);

/**
 * `F(x, y)`.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` points to one value.
 */
enum FslStatus fsl_evaluate_f(const struct FslStructure *s,
                              const double *x,
                              const double *y,
                              size_t n,
                              double *out);

/**
 * Fundamental tensor `g_ij`, `n*n` values.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` holds `n*n`.
 */
enum FslStatus fsl_metric(const struct FslStructure *s,
                          const double *x,
                          const double *y,
                          size_t n,
                          double *out);

/**
 * Nonlinear connection `N^i_m`, `n*n` values.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` holds `n*n`.
 */
enum FslStatus fsl_nonlinear_connection(const struct FslStructure *s,
                                        const double *x,
                                        const double *y,
                                        size_t n,
                                        double *out);

/**
 * Chern connection coefficients `Gamma^i_jk`, `n^3` values.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` holds `n^3`.
 */
enum FslStatus fsl_chern_gamma(const struct FslStructure *s,
                               const double *x,
                               const double *y,
                               size_t n,
                               double *out);

/**
 * hh-curvature `R^i_jkl`, `n^4` values.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` holds `n^4`.
 */
enum FslStatus fsl_hh_curvature(const struct FslStructure *s,
                                const double *x,
                                const double *y,
                                size_t n,
                                double *out);

/**
 * hv-curvature `P^i_jkl`, `n^4` values.
 *
 * # Safety
 * `x` and `y` hold `n` values; `out` holds `n^4`.
 */
enum FslStatus fsl_hv_curvature(const struct FslStructure *s,
                                const double *x,
                                const double *y,
                                size_t n,
                                double *out);

/**
 * Flag curvature of the flag with pole `y` and transverse edge `u`.
 *
 * # Safety
 * `x`, `y` and `u` hold `n` values; `out` points to one value.
 */
enum FslStatus fsl_flag_curvature(const struct FslStructure *s,
                                  const double *x,
                                  const double *y,
                                  const double *u,
                                  size_t n,
                                  double *out);

/**
 * Runs a full check configuration (the CLI's TOML format) and returns the
 * JSON report in `*report_json` and the CLI exit status in `*exit_code`.
 *
 * # Safety
 * `config_toml` must be NUL-terminated; the out pointers must be valid.
 * The report is released with [`fsl_string_free`].
 */
enum FslStatus fsl_run(const char *config_toml, char **report_json, int32_t *exit_code);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void fsl_string_free(char *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FINSLER_H */
