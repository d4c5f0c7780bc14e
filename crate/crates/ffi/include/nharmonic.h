#ifndef NHARMONIC_H
#define NHARMONIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NhKind {
  NH_KIND_IDENTITY_LIKE = 0,
  NH_KIND_INVERSION_LIKE = 1,
  NH_KIND_PLUS = 2,
  NH_KIND_MINUS = 3,
} NhKind;

typedef enum NhMinimality {
  NH_MINIMALITY_PROVEN_MINIMAL = 0,
  NH_MINIMALITY_RADIAL_UNPROVEN = 1,
} NhMinimality;

typedef enum NhRegime {
  NH_REGIME_CONTRACTING_BELOW = 0,
  NH_REGIME_CONTRACTING_WITHIN = 1,
  NH_REGIME_CONFORMAL = 2,
  NH_REGIME_EXPANDING_WITHIN = 3,
  NH_REGIME_EXPANDING_ABOVE = 4,
} NhRegime;

/**
 * Outcome of a call. Values match the command-line exit codes.
 */
typedef enum NhStatus {
  NH_STATUS_OK = 0,
  /**
   * Null pointer or malformed argument.
   */
  NH_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input outside the mathematical domain, or a failed precondition.
   */
  NH_STATUS_DOMAIN = 3,
  /**
   * An iterative method did not converge.
   */
  NH_STATUS_NUMERICAL = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  NH_STATUS_INTERNAL = 5,
} NhStatus;

/**
 * Opaque minimizer plan.
 */
typedef struct NhMinimizer NhMinimizer;

/**
 * Strain data of a radial profile at radius `t`; `eta` may be infinite.
 */
typedef struct NhStrainSample {
  double t;
  double h;
  double hdot;
  double eta;
} NhStrainSample;

/**
 * Parameters of a minimizer `t -> lambda * H_kind(k t)`. For a hammering
 * composite, radii in `[source inner, rho)` collapse onto `hammer_to`;
 * otherwise both fields are NaN.
 */
typedef struct NhRadialMap {
  enum NhKind kind;
  double lambda;
  double k;
  double rho;
  double hammer_to;
} NhRadialMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *nh_last_error_message(void);

/**
 * Area of the unit sphere in R^n.
 */
enum NhStatus nh_sphere_area(uint32_t n, double *out);

/**
 * Conformal modulus of the annulus `inner < |x| < outer`.
 */
enum NhStatus nh_modulus(uint32_t n, double inner, double outer, double *out);

/**
 * Principal radial solution of the given kind at `t > 0`.
 */
enum NhStatus nh_principal_sample(enum NhKind kind,
                                  double t,
                                  uint32_t n,
                                  struct NhStrainSample *out);

enum NhStatus nh_h_plus(double t, uint32_t n, struct NhStrainSample *out);

enum NhStatus nh_h_minus(double t, uint32_t n, struct NhStrainSample *out);

/**
 * Largest elasticity admitting a radial minimizer; infinite for n = 2, 3.
 */
enum NhStatus nh_alpha_n(uint32_t n, double *out);

enum NhStatus nh_gamma_n(uint32_t n, double *out);

/**
 * Defined for n >= 4; smaller `n` gives `NH_STATUS_DOMAIN`.
 */
enum NhStatus nh_delta_n(uint32_t n, double *out);

/**
 * Lower Nitsche bound for a source of modulus `mod_source`.
 */
enum NhStatus nh_lower_nitsche(uint32_t n, double mod_source, double *out);

/**
 * Upper Nitsche bound; infinite for n <= 3.
 */
enum NhStatus nh_upper_nitsche(uint32_t n, double mod_source, double *out);

enum NhStatus nh_classify(uint32_t n,
                          double source_inner,
                          double source_outer,
                          double target_inner,
                          double target_outer,
                          enum NhRegime *out);

/**
 * Builds the energy-minimal radial map between two annuli. On success `*out`
 * holds a handle that must be released with `nh_minimizer_free`.
 */
enum NhStatus nh_minimize(uint32_t n,
                          double source_inner,
                          double source_outer,
                          double target_inner,
                          double target_outer,
                          struct NhMinimizer **out);

enum NhStatus nh_minimizer_energy(const struct NhMinimizer *h, double *out);

enum NhStatus nh_minimizer_regime(const struct NhMinimizer *h, enum NhRegime *out);

enum NhStatus nh_minimizer_status(const struct NhMinimizer *h, enum NhMinimality *out);

enum NhStatus nh_minimizer_map(const struct NhMinimizer *h, struct NhRadialMap *out);

/**
 * Full plan as a JSON document; release with `nh_string_free`.
 */
enum NhStatus nh_minimizer_to_json(const struct NhMinimizer *h, char **out);

/**
 * Releases a handle from `nh_minimize`. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from `nh_minimize` that has not been freed.
 */
void nh_minimizer_free(struct NhMinimizer *h);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library that has not been freed.
 */
void nh_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NHARMONIC_H */
