/* C interface to the cavity-pointer decoherence simulator. */

#ifndef CAVITY_POINTER_H
#define CAVITY_POINTER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum {
  CAVITY_POINTER_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CAVITY_POINTER_STATUS_NULL_POINTER = 1,
  /**
   * An argument was outside its domain (sizes, signs, finiteness).
   */
  CAVITY_POINTER_STATUS_INVALID_INPUT = 2,
  /**
   * Decoherence time undefined: equal Fock labels or all forces zero.
   */
  CAVITY_POINTER_STATUS_NO_DECOHERENCE = 3,
  /**
   * Internal panic; the out-values are untouched.
   */
  CAVITY_POINTER_STATUS_INTERNAL = 4,
} CavityPointerStatus;

/**
 * Opaque simulator handle: internal mode ensemble, pointer parameters and
 * the hbar convention.
 */
typedef struct CavityPointerModel CavityPointerModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a model from an explicit internal-mode list.
 *
 * `masses`, `forces`, `widths` and `counts` are parallel arrays of length
 * `n_modes`. On success `*out` owns the handle; release it with
 * [`cavity_pointer_model_free`].
 *
 * # Safety
 * Array pointers must reference `n_modes` readable elements and `out` must
 * be a valid writable pointer.
 */
CavityPointerStatus cavity_pointer_model_from_modes(const double *masses,
                                                    const double *forces,
                                                    const double *widths,
                                                    const uint64_t *counts,
                                                    uintptr_t n_modes,
                                                    double pointer_mass,
                                                    double pointer_coupling,
                                                    double pointer_width,
                                                    double pointer_position,
                                                    double hbar,
                                                    CavityPointerModel **out);

/**
 * Build a model from the laboratory description: per-particle masses and
 * radiation-pressure couplings. The pointer is the center of mass (mass
 * `sum m_i`, coupling `sum g_i`); the internal modes are derived by
 * diagonalizing the relative-coordinate mass matrix.
 *
 * # Safety
 * `masses` and `couplings` must reference `n_particles` readable elements
 * and `out` must be a valid writable pointer.
 */
CavityPointerStatus cavity_pointer_model_from_lab(const double *masses,
                                                  const double *couplings,
                                                  uintptr_t n_particles,
                                                  double packet_width,
                                                  double pointer_width,
                                                  double pointer_position,
                                                  double hbar,
                                                  CavityPointerModel **out);

/**
 * Release a model handle. Null is accepted and ignored.
 *
 * # Safety
 * `model` must be null or a pointer previously returned by a constructor,
 * not yet freed.
 */
void cavity_pointer_model_free(CavityPointerModel *model);

/**
 * Total internal mode count (with multiplicity).
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
CavityPointerStatus cavity_pointer_mode_count(const CavityPointerModel *model, uint64_t *out);

/**
 * Decoherence factor `F_mn(t)`: real and imaginary parts plus the log
 * magnitude (finite even when the factor itself underflows). Out-pointers
 * may be null to skip an output.
 *
 * # Safety
 * `model` must be valid; non-null out-pointers must be writable.
 */
CavityPointerStatus cavity_pointer_decoherence_factor(const CavityPointerModel *model,
                                                      uint32_t m,
                                                      uint32_t n,
                                                      double t,
                                                      double *out_re,
                                                      double *out_im,
                                                      double *out_log_mag);

/**
 * Long-time decay rate `Gamma = sum_j f_j^2 / (32 m'_j^2 a_j^2)`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
CavityPointerStatus cavity_pointer_gamma_longtime(const CavityPointerModel *model, double *out);

/**
 * Decoherence time: the long-time-law solution `[(m-n)^2 Gamma]^{-1/4}` and
 * the exact crossing of the full decay law.
 *
 * # Safety
 * `model` must be valid; non-null out-pointers must be writable.
 */
CavityPointerStatus cavity_pointer_decoherence_time(const CavityPointerModel *model,
                                                    uint32_t m,
                                                    uint32_t n,
                                                    double *out_long_time,
                                                    double *out_exact);

/**
 * Total random phase spread `Delta phi_mn(t)` over all internal modes.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
CavityPointerStatus cavity_pointer_phase_std_total(const CavityPointerModel *model,
                                                   uint32_t m,
                                                   uint32_t n,
                                                   double t,
                                                   double *out);

/**
 * Pointer-state overlap `<x_n(t)|x_m(t)>` (real, imaginary, log magnitude).
 *
 * # Safety
 * `model` must be valid; non-null out-pointers must be writable.
 */
CavityPointerStatus cavity_pointer_pointer_overlap(const CavityPointerModel *model,
                                                   uint32_t m,
                                                   uint32_t n,
                                                   double t,
                                                   double *out_re,
                                                   double *out_im,
                                                   double *out_log_mag);

/**
 * Static description of a status code.
 */
const char *cavity_pointer_status_message(CavityPointerStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_POINTER_H */
