#ifndef UAV_OUTAGE_H
#define UAV_OUTAGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum UoStatus {
  UO_STATUS_OK = 0,
  UO_STATUS_NULL_POINTER = 1,
  UO_STATUS_INVALID_UTF8 = 2,
  UO_STATUS_INVALID_PARAMETER = 3,
  UO_STATUS_ZERO_DISTANCE = 4,
  UO_STATUS_NON_CONVERGENCE = 5,
  UO_STATUS_NO_CROSSING = 6,
  UO_STATUS_CONFIG = 7,
  UO_STATUS_IO = 8,
  UO_STATUS_PANIC = 9,
} UoStatus;

/**
 * Propagation state requested for a link.
 */
typedef enum UoEnv {
  /**
   * Drawn from the link's LoS probability.
   */
  UO_ENV_DRAWN = 0,
  UO_ENV_LOS = 1,
  UO_ENV_NLOS = 2,
} UoEnv;

/**
 * Opaque scenario handle.
 */
typedef struct UoScenario UoScenario;

typedef struct UoBreakdown {
  double p_ll;
  double p_ln;
  double p_nl;
  double p_nn;
  double w_ll;
  double w_ln;
  double w_nl;
  double w_nn;
  double total;
} UoBreakdown;

typedef struct UoEstimate {
  double p_hat;
  /**
   * Binomial standard error of `p_hat`.
   */
  double std_error;
  uint64_t trials;
} UoEstimate;

typedef struct UoHeightOptimum {
  double height;
  double outage;
} UoHeightOptimum;

typedef struct UoCrossing {
  double v_prime;
  double bracket_lo;
  double bracket_hi;
  double residual;
} UoCrossing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *uo_last_error_message(void);

/**
 * Parses a scenario from configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UoStatus uo_scenario_parse(const char *text, struct UoScenario **out);

/**
 * Loads a scenario from a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UoStatus uo_scenario_load(const char *path, struct UoScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void uo_scenario_free(struct UoScenario *s);

/**
 * Replaces the main link's vertical distance (UAV height) in place.
 *
 * # Safety
 * `s` must be a live scenario handle.
 */
enum UoStatus uo_scenario_set_main_height(struct UoScenario *s, double height);

/**
 * Closed-form outage probability with its per-case breakdown.
 *
 * Pass `UoEnv::Drawn` for both links to mix over the LoS probabilities,
 * or force both.
 *
 * # Safety
 * `s` must be a live scenario handle and `out` a valid pointer.
 */
enum UoStatus uo_outage(const struct UoScenario *s,
                        enum UoEnv main_env,
                        enum UoEnv interferer_env,
                        struct UoBreakdown *out);

/**
 * Monte Carlo outage estimate. `workers = 0` uses one chunk per thread.
 * The result depends only on `trials`, `seed` and the forcing.
 *
 * # Safety
 * `s` must be a live scenario handle and `out` a valid pointer.
 */
enum UoStatus uo_simulate(const struct UoScenario *s,
                          uint64_t trials,
                          uint64_t seed,
                          uintptr_t workers,
                          enum UoEnv main_env,
                          enum UoEnv interferer_env,
                          struct UoEstimate *out);

/**
 * Height in `[h_min, h_max]` minimising the total outage probability.
 *
 * # Safety
 * `s` must be a live scenario handle and `out` a valid pointer.
 */
enum UoStatus uo_optimal_height(const struct UoScenario *s,
                                double h_min,
                                double h_max,
                                struct UoHeightOptimum *out);

/**
 * Power ratio at which the LoS/LoS and NLoS/NLoS outage curves cross.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum UoStatus uo_crossing(double k_main,
                          double k_interferer,
                          double gamma_t,
                          struct UoCrossing *out);

double uo_bessel_i0(double x);

double uo_bessel_i1(double x);

/**
 * `e^{-x} I0(x)`, finite for every finite `x >= 0`.
 */
double uo_bessel_i0_scaled(double x);

/**
 * `e^{-x} I1(x)`, finite for every finite `x >= 0`.
 */
double uo_bessel_i1_scaled(double x);

/**
 * First-order Marcum Q-function at the default accuracy.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum UoStatus uo_marcum_q1(double a, double b, double *out);

/**
 * `1 − Q1(a, b)`, accurate where Q1 is close to one.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum UoStatus uo_marcum_p1(double a, double b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UAV_OUTAGE_H */
