#ifndef WEDGE_SPECTRA_H
#define WEDGE_SPECTRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsGeometryClass {
  WS_GEOMETRY_CLASS_OUTGOING = 0,
  WS_GEOMETRY_CLASS_TANGENT = 1,
  WS_GEOMETRY_CLASS_INGOING = 2,
} WsGeometryClass;

/**
 * Status codes.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_INVALID_ARGUMENT = 1,
  WS_STATUS_NULL_POINTER = 2,
  WS_STATUS_MESH = 3,
  WS_STATUS_FACTORIZATION = 4,
  WS_STATUS_NOT_CONVERGED = 5,
  WS_STATUS_IO = 6,
  WS_STATUS_PANIC = 7,
} WsStatus;

/**
 * Opaque band solver.
 */
typedef struct WsBandSolver WsBandSolver;

/**
 * Mesh and solver parameters of a band solver.
 */
typedef struct WsBandParams {
  double length;
  size_t n;
  /**
   * 1 or 2.
   */
  uint32_t order;
  double tol;
} WsBandParams;

typedef struct WsConstants {
  double theta0;
  double xi0;
  double big_xi0;
  double tau0;
} WsConstants;

typedef struct WsGeometry {
  double theta_plus;
  double theta_minus;
  double theta0;
  enum WsGeometryClass klass;
} WsGeometry;

typedef struct WsEnergyReport {
  double energy;
  double argmin_tau;
  double e_star;
  /**
   * `INFINITY` for outgoing fields.
   */
  double s_ess_inf;
  double s_inf_minus;
  double s_inf_plus;
  enum WsGeometryClass klass;
  bool strict;
} WsEnergyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t ws_last_error_message(char *buf, size_t len);

/**
 * Default parameters: `L = 20`, `n = 160`, `Q2`, `tol = 1e-8`.
 */
struct WsBandParams ws_band_params_default(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_constants(struct WsConstants *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_face_angles(double b1, double b2, double b3, double alpha, struct WsGeometry *out);

/**
 * Half-space ground energy `sigma(theta)`, `theta` in `[0, pi/2]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_sigma(double theta, double *out);

/**
 * Creates a band solver for the field `(b1, b2, b3)` on the sector of opening `alpha`.
 *
 * # Safety
 * `params` must be readable and `out` valid for writes. On success `*out`
 * owns a solver to be released with [`ws_band_solver_free`].
 */
enum WsStatus ws_band_solver_new(double b1,
                                 double b2,
                                 double b3,
                                 double alpha,
                                 const struct WsBandParams *params,
                                 struct WsBandSolver **out);

/**
 * # Safety
 * `solver` must come from [`ws_band_solver_new`] and not be used afterwards.
 */
void ws_band_solver_free(struct WsBandSolver *solver);

/**
 * Number of unknowns of the discretization.
 *
 * # Safety
 * `solver` must be a live handle and `out` valid for writes.
 */
enum WsStatus ws_band_solver_unknowns(const struct WsBandSolver *solver, size_t *out);

/**
 * Lowest eigenvalue of the fiber at `tau` and its relative residual.
 *
 * # Safety
 * `solver` must be a live handle; `value` valid for writes; `residual` null or valid.
 */
enum WsStatus ws_band_value(const struct WsBandSolver *solver,
                            double tau,
                            double *value,
                            double *residual);

/**
 * Evaluates the band on the strictly increasing `taus[0..len]` into
 * `values` and refines the minimum.
 *
 * # Safety
 * `taus` readable and `values` writable for `len` elements; `argmin`, `min`
 * null or valid.
 */
enum WsStatus ws_band_scan(const struct WsBandSolver *solver,
                           const double *taus,
                           size_t len,
                           double *values,
                           double *argmin,
                           double *min);

/**
 * Ground energy over the grid `[tau_min, tau_max]` with step `tau_step`.
 *
 * # Safety
 * `solver` must be a live handle and `out` valid for writes.
 */
enum WsStatus ws_ground_energy(const struct WsBandSolver *solver,
                               double tau_min,
                               double tau_max,
                               double tau_step,
                               struct WsEnergyReport *out);

/**
 * `b2 Xi0 + C(B) alpha^2`; needs `b2 > 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_small_angle_upper_bound(double b1,
                                         double b2,
                                         double b3,
                                         double alpha,
                                         double *out);

/**
 * Best Gaussian quasimode energy and its parameter `rho`.
 *
 * # Safety
 * `bound` must be valid for writes; `rho` null or valid.
 */
enum WsStatus ws_gaussian_upper_bound(double b1,
                                      double b2,
                                      double b3,
                                      double alpha,
                                      double *bound,
                                      double *rho);

/**
 * Opening below which the Gaussian bound certifies `E < E*` on the scan grid.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum WsStatus ws_strictness_threshold(double b1, double b2, double b3, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEDGE_SPECTRA_H */
