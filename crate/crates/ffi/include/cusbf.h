/* C interface to the cusbf massive MIMO scheduling simulator. */

#ifndef CUSBF_H
#define CUSBF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum CusbfStatus {
  /**
   * Success.
   */
  CusbfStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  CusbfStatus_NullArgument = 1,
  /**
   * An argument failed to parse (key, value, scheme, or variable).
   */
  CusbfStatus_InvalidArgument = 2,
  /**
   * The configuration violates an invariant.
   */
  CusbfStatus_InvalidConfig = 3,
  /**
   * The simulation itself failed; see `cusbf_last_error_message`.
   */
  CusbfStatus_ComputationFailed = 4,
} CusbfStatus;

/**
 * Scheduling/beamforming scheme selector.
 */
typedef enum CusbfScheme {
  CusbfScheme_Cusbf = 0,
  CusbfScheme_Gwc = 1,
  CusbfScheme_Jsdm = 2,
} CusbfScheme;

/**
 * Opaque scenario configuration handle.
 */
typedef struct CusbfConfig CusbfConfig;

/**
 * Monte Carlo aggregate over the configured drops.
 */
typedef struct CusbfRunSummary {
  /**
   * Mean sum rate in bits/s/Hz.
   */
  double sum_rate_mean;
  /**
   * Standard error of the sum-rate mean.
   */
  double sum_rate_stderr;
  /**
   * Mean rate per served user in bits/s/Hz.
   */
  double per_user_rate_mean;
  /**
   * Mean number of served users.
   */
  double n_selected_mean;
  /**
   * Number of Monte Carlo drops evaluated.
   */
  uint64_t drops;
  /**
   * Master seed the runs derived their streams from.
   */
  uint64_t seed;
} CusbfRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail message of the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cusbf_last_error_message(void);

/**
 * New configuration with the library defaults. Never null.
 */
struct CusbfConfig *cusbf_config_new(void);

/**
 * Parse a `key = value` configuration text (same format as the CLI
 * config file). Returns null on error, with the detail in
 * `cusbf_last_error_message`.
 */
struct CusbfConfig *cusbf_config_parse(const char *text);

/**
 * Set one field by name; keys match the config-file keys.
 */
enum CusbfStatus cusbf_config_set(struct CusbfConfig *config, const char *key, const char *value);

/**
 * Check every configuration invariant.
 */
enum CusbfStatus cusbf_config_validate(const struct CusbfConfig *config);

/**
 * Release a configuration handle. Null is a no-op.
 */
void cusbf_config_free(struct CusbfConfig *config);

/**
 * Receiver noise power in watts for this configuration.
 */
enum CusbfStatus cusbf_noise_power_w(const struct CusbfConfig *config, double *out);

/**
 * Run the configured Monte Carlo experiment for one scheme.
 */
enum CusbfStatus cusbf_monte_carlo(const struct CusbfConfig *config,
                                   enum CusbfScheme scheme,
                                   struct CusbfRunSummary *out);

/**
 * Run a sweep and return the CSV table as a newly allocated string, or
 * null on error. `variable` is one of `epsilon`, `K`, `K_s`,
 * `power_dBm`, `M`. Release the string with `cusbf_string_free`.
 */
char *cusbf_sweep_csv(const struct CusbfConfig *config,
                      const char *variable,
                      const double *values,
                      uintptr_t n_values,
                      const enum CusbfScheme *schemes,
                      uintptr_t n_schemes);

/**
 * Release a string returned by this library. Null is a no-op.
 */
void cusbf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUSBF_H */
