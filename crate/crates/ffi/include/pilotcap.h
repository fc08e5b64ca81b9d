#ifndef PILOTCAP_H
#define PILOTCAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PilotcapStatus {
  PILOTCAP_STATUS_OK = 0,
  PILOTCAP_STATUS_NULL_POINTER = 1,
  PILOTCAP_STATUS_PARSE_ERROR = 2,
  PILOTCAP_STATUS_INVALID_MATRIX = 3,
  PILOTCAP_STATUS_INVALID_CONFIG = 4,
  PILOTCAP_STATUS_NUMERIC_FAILURE = 5,
  PILOTCAP_STATUS_PANIC = 6,
} PilotcapStatus;

/**
 * Opaque channel covariance handle.
 */
typedef struct PilotcapChannel PilotcapChannel;

/**
 * Opaque capacity curve handle.
 */
typedef struct PilotcapCurve PilotcapCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *pilotcap_last_error_message(void);

/**
 * Creates a channel from `dim * dim` row-major covariance entries.
 *
 * # Safety
 * `entries` must point to `dim * dim` readable doubles and `out` to a
 * writable handle slot.
 */
enum PilotcapStatus pilotcap_channel_new(const double *entries,
                                         size_t dim,
                                         struct PilotcapChannel **out);

/**
 * Loads a channel covariance from a matrix file (text rows or JSON).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum PilotcapStatus pilotcap_channel_from_file(const char *path, struct PilotcapChannel **out);

/**
 * # Safety
 * `channel` must be NULL or a handle from this library not yet freed.
 */
void pilotcap_channel_free(struct PilotcapChannel *channel);

/**
 * Number of receive antennas, or 0 for NULL.
 *
 * # Safety
 * `channel` must be NULL or a live handle.
 */
size_t pilotcap_channel_dim(const struct PilotcapChannel *channel);

/**
 * Capacity in bits per block. `t_tau = 0` yields `-INFINITY`.
 *
 * # Safety
 * `channel` must be a live handle and `out_bits` writable.
 */
enum PilotcapStatus pilotcap_capacity(const struct PilotcapChannel *channel,
                                      double power,
                                      uint64_t block_length,
                                      uint64_t t_tau,
                                      double *out_bits);

/**
 * Writes the `m × m` estimation error covariance row-major into `out`.
 *
 * # Safety
 * `channel` must be a live handle and `out` must hold `out_len` doubles.
 */
enum PilotcapStatus pilotcap_error_covariance(const struct PilotcapChannel *channel,
                                              double power,
                                              uint64_t block_length,
                                              uint64_t t_tau,
                                              double *out,
                                              size_t out_len);

/**
 * Capacity at every `t_tau` in `[1, block_length]`.
 *
 * # Safety
 * `channel` must be a live handle and `out` a writable handle slot.
 */
enum PilotcapStatus pilotcap_sweep(const struct PilotcapChannel *channel,
                                   double power,
                                   uint64_t block_length,
                                   struct PilotcapCurve **out);

/**
 * # Safety
 * `curve` must be NULL or a live handle.
 */
size_t pilotcap_curve_len(const struct PilotcapCurve *curve);

/**
 * Smallest capacity-maximizing `t_tau`, or 0 for NULL.
 *
 * # Safety
 * `curve` must be NULL or a live handle.
 */
uint64_t pilotcap_curve_argmax(const struct PilotcapCurve *curve);

/**
 * # Safety
 * `curve` must be NULL or a live handle.
 */
double pilotcap_curve_max_bits(const struct PilotcapCurve *curve);

/**
 * Reads entry `index` (0-based, ascending `t_tau`).
 *
 * # Safety
 * `curve` must be a live handle; `out_t_tau` and `out_bits` writable.
 */
enum PilotcapStatus pilotcap_curve_get(const struct PilotcapCurve *curve,
                                       size_t index,
                                       uint64_t *out_t_tau,
                                       double *out_bits);

/**
 * # Safety
 * `curve` must be NULL or a handle from this library not yet freed.
 */
void pilotcap_curve_free(struct PilotcapCurve *curve);

/**
 * Runs the seeded estimator simulation and returns its report as a JSON
 * string, to be released with [`pilotcap_string_free`].
 *
 * # Safety
 * `channel` must be a live handle and `out_json` writable.
 */
enum PilotcapStatus pilotcap_simulate_json(const struct PilotcapChannel *channel,
                                           double power,
                                           uint64_t block_length,
                                           uint64_t t_tau,
                                           uint64_t seed,
                                           uint64_t trials,
                                           char **out_json);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void pilotcap_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PILOTCAP_H */
