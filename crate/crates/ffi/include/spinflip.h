#ifndef SPINFLIP_H
#define SPINFLIP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum SfRegime {
  SF_REGIME_THICK_SMALL_DELTA = 0,
  SF_REGIME_THICK_LARGE_DELTA = 1,
  SF_REGIME_THIN_FILM = 2,
  SF_REGIME_CROSSOVER = 3,
} SfRegime;

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  // Results were written but the quadrature missed its tolerance.
  SF_STATUS_NOT_CONVERGED = 3,
  SF_STATUS_PANIC = 4,
} SfStatus;

// Opaque vacuum / film / substrate stack.
typedef struct SfStack SfStack;

// Opaque spin transition.
typedef struct SfTransition SfTransition;

// Imaginary part of the curl-curl Green tensor at the atom [1/m^3].
typedef struct SfGreen {
  double in_plane;
  double normal;
  double free;
  double abs_error_estimate;
  uintptr_t evaluations;
} SfGreen;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *sf_last_error(void);

// Thick slab with skin depth `delta` [m] at angular frequency `omega_ref`.
enum SfStatus sf_stack_thick(double delta, double omega_ref, struct SfStack **out);

// Thick slab of conductivity `sigma` [S/m].
enum SfStatus sf_stack_thick_conductor(double sigma, struct SfStack **out);

// Film of thickness `h` [m] and skin depth `delta` at `omega_ref` on a
// dielectric substrate.
enum SfStatus sf_stack_film(double delta,
                            double omega_ref,
                            double h,
                            double substrate_eps,
                            struct SfStack **out);

enum SfStatus sf_stack_vacuum(struct SfStack **out);

// Releases a stack; null is ignored.
//
// # Safety
// `stack` must come from an `sf_stack_*` constructor and not be freed twice.
void sf_stack_free(struct SfStack *stack);

// 87Rb |F=2, mF=2> -> |2, 1> at Larmor angular frequency `omega`.
enum SfStatus sf_transition_rb87(double omega, struct SfTransition **out);

enum SfStatus sf_transition_hyperfine(double omega,
                                      double f,
                                      double mf_initial,
                                      double mf_final,
                                      double nuclear_spin,
                                      struct SfTransition **out);

// Releases a transition; null is ignored.
//
// # Safety
// `t` must come from an `sf_transition_*` constructor and not be freed twice.
void sf_transition_free(struct SfTransition *t);

// Zero-temperature free-space lifetime [s].
enum SfStatus sf_free_space_lifetime(const struct SfTransition *t, double *out_tau);

enum SfStatus sf_thermal_occupation(double omega, double temperature, double *out);

enum SfStatus sf_skin_depth(double sigma, double omega, double *out);

// Scattered and free curl-curl components at distance `d` above `stack`.
// On `NotConverged` `out` holds the best estimate.
enum SfStatus sf_green(double d,
                       double omega,
                       const struct SfStack *stack,
                       double rel_tol,
                       struct SfGreen *out);

// Spin-flip rate [1/s]. `out_green` may be null. On `NotConverged` the
// outputs hold the best estimate.
enum SfStatus sf_flip_rate(const struct SfTransition *t,
                           double d,
                           const struct SfStack *stack,
                           double temperature,
                           double rel_tol,
                           double *out_gamma,
                           struct SfGreen *out_green);

// Closed-form lifetime. `h` may be `INFINITY`. The regime is classified with
// scale separation `separation` (10 if not positive); in the crossover
// region `out_tau` is NaN.
enum SfStatus sf_asymptotic_lifetime(double d,
                                     double delta,
                                     double h,
                                     double omega,
                                     double temperature,
                                     double tau0,
                                     double separation,
                                     double *out_tau,
                                     enum SfRegime *out_regime);

// Null-terminated library version.
const char *sf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINFLIP_H */
