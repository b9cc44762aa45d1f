#ifndef COSET_MAC_H
#define COSET_MAC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define COSET_MAC_OK 0

/**
 * Invalid input; see the last error message.
 */
#define COSET_MAC_ERR_VALIDATION 1

/**
 * The request exceeds a size or enumeration cap.
 */
#define COSET_MAC_ERR_BUDGET 2

#define COSET_MAC_ERR_INTERNAL 3

#define COSET_MAC_ERR_NULL 4

/**
 * A string argument is not valid UTF-8.
 */
#define COSET_MAC_ERR_UTF8 5

/**
 * The library panicked; the call had no effect on its out pointers.
 */
#define COSET_MAC_ERR_PANIC 6

/**
 * `family` values of [`coset_mac_best_sum_rate`].
 */
#define COSET_MAC_FAMILY_ALPHA 0

#define COSET_MAC_FAMILY_BETA_F 1

/**
 * A channel with states known at the two transmitters.
 */
typedef struct CosetMacChannel CosetMacChannel;

/**
 * A test channel: per-user conditionals composed with a channel.
 */
typedef struct CosetMacTestChannel CosetMacTestChannel;

/**
 * Alphabet sizes of a channel: states, inputs (two each) and the output.
 */
typedef struct CosetMacChannelShape {
  size_t state_sizes[2];
  size_t input_sizes[2];
  size_t output_size;
} CosetMacChannelShape;

/**
 * Closed-form sum rates of the quaternary doubly dirty MAC.
 */
typedef struct CosetMacQddForms {
  double alpha;
  double beta_f;
  double beta_g;
  double i_s;
  double h_x;
} CosetMacQddForms;

/**
 * Simulation settings; `k` and `l` are the inner and message dimensions per user.
 */
typedef struct CosetMacSimConfig {
  size_t n;
  size_t k[2];
  size_t l[2];
  double delta;
  uint64_t trials;
  uint64_t seed;
  /**
   * Nonzero to reuse one code in every trial.
   */
  int32_t fixed_code;
} CosetMacSimConfig;

/**
 * Simulation result, as rates over the trials.
 */
typedef struct CosetMacSimResult {
  double rate_sum;
  double enc_fail[2];
  double dec_err;
  double cost[2];
} CosetMacSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *coset_mac_last_error(void);

/**
 * Looks up a catalog channel by name (e.g. "bdd", "qdd", "example2").
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
int32_t coset_mac_channel_catalog(const char *name, struct CosetMacChannel **out);

/**
 * Parses a channel from the plain-text description format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
int32_t coset_mac_channel_from_config(const char *text, struct CosetMacChannel **out);

/**
 * Releases a channel; null is ignored.
 *
 * # Safety
 * `ch` must come from a `coset_mac_channel_*` constructor and not be used again.
 */
void coset_mac_channel_free(struct CosetMacChannel *ch);

/**
 * # Safety
 * `ch` must be a live channel handle and `out` a valid pointer.
 */
int32_t coset_mac_channel_shape(const struct CosetMacChannel *ch, struct CosetMacChannelShape *out);

/**
 * h_b(p) in bits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t coset_mac_binary_entropy(double p, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t coset_mac_qdd_closed_forms(double tau, struct CosetMacQddForms *out);

/**
 * Grid search of the best sum rate at each cost in `taus` (strictly increasing,
 * length `len`). Writes the values before time sharing to `pre_envelope` and after
 * it to `envelope`, each of length `len`. `budget` caps the number of test channel
 * pairs.
 *
 * # Safety
 * `ch` must be a live handle; `taus`, `pre_envelope` and `envelope` must point to
 * `len` doubles.
 */
int32_t coset_mac_best_sum_rate(const struct CosetMacChannel *ch,
                                int32_t family,
                                const double *taus,
                                size_t len,
                                double step,
                                size_t aux_size,
                                uint64_t budget,
                                double *pre_envelope,
                                double *envelope);

/**
 * Builds a named parametric test channel (e.g. "bdd-linear", "qdd-group").
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
int32_t coset_mac_test_channel_named(const char *name,
                                     double tau,
                                     struct CosetMacTestChannel **out);

/**
 * Releases a test channel; null is ignored.
 *
 * # Safety
 * `tc` must come from [`coset_mac_test_channel_named`] and not be used again.
 */
void coset_mac_test_channel_free(struct CosetMacTestChannel *tc);

/**
 * Linear coset code sum rate of a test channel over a finite field.
 *
 * # Safety
 * `tc` must be a live handle and `out` a valid pointer.
 */
int32_t coset_mac_beta_f_sum_rate(const struct CosetMacTestChannel *tc, double *out);

/**
 * Monte Carlo run of random nested coset codes with the sum decoder.
 *
 * # Safety
 * `tc` must be a live handle; `cfg` and `out` valid pointers.
 */
int32_t coset_mac_simulate(const struct CosetMacTestChannel *tc,
                           const struct CosetMacSimConfig *cfg,
                           struct CosetMacSimResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COSET_MAC_H */
