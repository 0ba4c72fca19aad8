/* C interface for the redfield qubit-channel toolkit. */

#ifndef REDFIELD_H
#define REDFIELD_H

/* Generated by the build script; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a toolkit call.
 */
typedef enum RfStatus {
  /**
   * The call succeeded and the out-parameters are valid.
   */
  RF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RF_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range, non-finite, or otherwise malformed.
   */
  RF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The rates violate a physical requirement (negativity, detailed
   * balance, coupling strength).
   */
  RF_STATUS_INVALID_RATES = 3,
  /**
   * The state is not an admissible density matrix.
   */
  RF_STATUS_UNPHYSICAL_STATE = 4,
  /**
   * The initial-state family constraints are violated.
   */
  RF_STATUS_FAMILY_CONSTRAINT = 5,
  /**
   * The requested quantity needs a dissipative fixed point and
   * `gamma = 0` provides none.
   */
  RF_STATUS_NO_EQUILIBRIUM = 6,
  /**
   * The requested quantity is only defined at zero temperature.
   */
  RF_STATUS_FINITE_TEMPERATURE = 7,
  /**
   * An internal numerical routine failed to converge.
   */
  RF_STATUS_NUMERICAL_FAILURE = 8,
} RfStatus;

/**
 * Opaque bath-parameter handle.
 */
typedef struct RfBath RfBath;

/**
 * A two-qubit X-state by value: diagonal entries and the two
 * anti-diagonal coherences split into real and imaginary parts.
 */
typedef struct RfXState {
  double rho11;
  double rho22;
  double rho33;
  double rho44;
  double re14;
  double im14;
  double re23;
  double im23;
} RfXState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a bath handle from the full parameter set
 * `(omega, omega_tilde, a, b, alpha, gamma, w, beta)`.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum RfStatus rf_bath_new(double omega,
                          double omega_tilde,
                          double a,
                          double b,
                          double alpha,
                          double gamma,
                          double w,
                          double beta,
                          struct RfBath **out);

/**
 * Builds a bath handle from rates plus the thermal ratio `w/gamma`,
 * with the renormalized frequency defaulting to `omega`.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum RfStatus rf_bath_with_ratio(double omega,
                                 double a,
                                 double b,
                                 double alpha,
                                 double gamma,
                                 double ratio,
                                 struct RfBath **out);

/**
 * Releases a bath handle.  Passing null is a no-op.
 *
 * # Safety
 * `bath` must be a handle produced by this library, released at most
 * once.
 */
void rf_bath_free(struct RfBath *bath);

/**
 * Creates a new handle carrying the ergodic average of `bath`:
 * transversal rates averaged, `b` dropped.
 *
 * # Safety
 * `bath` must be a valid handle; `out` must be writable.
 */
enum RfStatus rf_bath_davies(const struct RfBath *bath, struct RfBath **out);

/**
 * The coherent rotation frequency
 * `Omega = sqrt(4 omega_tilde^2 - 4 b^2 - (a - alpha)^2)`.
 *
 * # Safety
 * `bath` must be a valid handle; `out` must be writable.
 */
enum RfStatus rf_bath_big_omega(const struct RfBath *bath, double *out);

/**
 * The thermal fixed point as a Bloch vector `(0, 0, -w/gamma)`.
 *
 * # Safety
 * `bath` must be a valid handle; `bloch_out` must point to 3 doubles.
 */
enum RfStatus rf_bath_gibbs(const struct RfBath *bath, double *bloch_out);

/**
 * Evolves a single-qubit Bloch vector for a time `t >= 0`.
 *
 * # Safety
 * `bath` must be a valid handle; `bloch_in` and `bloch_out` must point
 * to 3 doubles each (they may alias).
 */
enum RfStatus rf_propagate(const struct RfBath *bath,
                           double t,
                           const double *bloch_in,
                           double *bloch_out);

/**
 * Initial rate of change of the Bloch-ball determinant function along
 * the evolution started from `bloch_in`; negative values witness
 * positivity loss.
 *
 * # Safety
 * `bath` must be a valid handle; `bloch_in` must point to 3 doubles;
 * `out` must be writable.
 */
enum RfStatus rf_det_rate_at_zero(const struct RfBath *bath, const double *bloch_in, double *out);

/**
 * Looks for a pure state contracted at a negative determinant rate at
 * `t = 0`.  Writes 1 to `found_out` and the state to `bloch_out` when
 * one exists (`b^2 > a * alpha`), 0 otherwise.
 *
 * # Safety
 * `bath` must be a valid handle; `bloch_out` must point to 3 doubles;
 * `found_out` must be writable.
 */
enum RfStatus rf_positivity_witness(const struct RfBath *bath,
                                    double *bloch_out,
                                    int32_t *found_out);

/**
 * Builds the four-parameter initial X-state
 * `diag(mu, nu, 1 - 2 mu - nu, mu)` with coherences `rho14 = u`,
 * `rho23 = i v`, validating the admissibility constraints.
 *
 * # Safety
 * `out` must be writable.
 */
enum RfStatus rf_family_state(double mu, double nu, double u, double v, struct RfXState *out);

/**
 * Evolves an X-state under `id (x) map_t` for a time `t >= 0`: the
 * first (ancilla) factor is untouched, the second factor evolves.
 *
 * # Safety
 * `bath` must be a valid handle; `state_in` and `state_out` must be
 * valid (they may alias).
 */
enum RfStatus rf_evolve(const struct RfBath *bath,
                        const struct RfXState *state_in,
                        double t,
                        struct RfXState *state_out);

/**
 * Concurrence of a physical X-state.
 *
 * # Safety
 * `state` must be valid; `out` must be writable.
 */
enum RfStatus rf_concurrence(const struct RfXState *state, double *out);

/**
 * Mutual information between the two qubits of an X-state.
 *
 * # Safety
 * `state` must be valid; `out` must be writable.
 */
enum RfStatus rf_mutual_information(const struct RfXState *state, double *out);

/**
 * Smallest eigenvalue of the Choi matrix of the time-`t` map; negative
 * values mean the map is not completely positive.
 *
 * # Safety
 * `bath` must be a valid handle; `out` must be writable.
 */
enum RfStatus rf_choi_min_eig(const struct RfBath *bath, double t, double *out);

/**
 * Initial growth rate of the dominant concurrence branch for a family
 * state under zero-temperature rates.
 *
 * # Safety
 * `bath` must be a valid handle; `out` must be writable.
 */
enum RfStatus rf_concurrence_slope_zero_temperature(const struct RfBath *bath,
                                                    double mu,
                                                    double nu,
                                                    double u,
                                                    double v,
                                                    double *out);

/**
 * A static, null-terminated name for a status code.
 */
const char *rf_status_name(enum RfStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* REDFIELD_H */
