/* C interface to glotsep: glottal source estimation by causal-anticausal decomposition. */

#ifndef GLOTSEP_H
#define GLOTSEP_H

/* Generated by cbindgen from the glotsep-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Decomposition backend selector.
typedef enum GsBackend {
  // Factor the frame polynomial and split its zeros against the unit
  // circle.
  GS_BACKEND_ZZT = 0,
  // Complex cepstrum with phase unwrapping.
  GS_BACKEND_CC = 1,
} GsBackend;

// Status code of every fallible call.
//
// The numeric values mirror the CLI's exit codes for the same failure
// classes, with an extra code for null handles or buffers.
typedef enum GsStatus {
  // The call succeeded.
  GS_OK = 0,
  // A parameter violates a documented precondition.
  GS_ERR_PARAM = 1,
  // Input data has an unsupported or malformed layout.
  GS_ERR_FORMAT = 2,
  // A numerical computation failed.
  GS_ERR_NUMERICAL = 3,
  // A required pointer argument was null.
  GS_ERR_NULL = 4,
} GsStatus;

// Opaque glottal-estimate handle.
typedef struct GsEstimate GsEstimate;

// Opaque analysis frame handle.
typedef struct GsFrame GsFrame;

// Voice-quality features of one glottal-source estimate.
//
// Features that are undefined for the given input (no pitch supplied,
// no resolvable harmonic, no spectral peak) are NaN; `valid` is 1 when
// the estimate's spectral center of gravity stays at or below the
// configured threshold and 0 otherwise.
typedef struct GsFeatures {
  double fg_hz;
  double bw_hz;
  double naq;
  double h1h2_db;
  double hrf_db;
  double cog_hz;
  uint8_t valid;
} GsFeatures;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library as a static, null-terminated string.
const char *gs_version(void);

// Message describing the most recent failure on the calling thread, or
// null when the last call on this thread succeeded.
//
// The pointer stays valid until the next glotsep call on the same
// thread; copy the string if it must outlive that.
const char *gs_last_error_message(void);

// Cuts a windowed GCI-centered analysis frame out of a speech signal.
//
// `gci_sample` is the index of the glottal closure instant inside
// `samples`, `period_samples` the local pitch period, `alpha` the window
// shape in [0.7, 1.0] (1.0 = Hanning) and `periods` the window length in
// pitch periods. On success `*out` owns the new frame; release it with
// [`gs_frame_free`].
//
// # Safety
//
// `samples` must point to `len` readable doubles and `out` to a writable
// pointer slot; the handle written to `*out` must be freed exactly once.
enum GsStatus gs_frame_from_signal(const double *samples,
                                   size_t len,
                                   uint32_t sample_rate,
                                   size_t gci_sample,
                                   size_t period_samples,
                                   double alpha,
                                   double periods,
                                   struct GsFrame **out);

// Wraps already-windowed samples as an analysis frame.
//
// For callers that apply their own window; the decomposition treats the
// samples as-is. On success `*out` owns the new frame; release it with
// [`gs_frame_free`].
//
// # Safety
//
// `samples` must point to `len` readable doubles and `out` to a writable
// pointer slot; the handle written to `*out` must be freed exactly once.
enum GsStatus gs_frame_from_windowed(const double *samples,
                                     size_t len,
                                     uint32_t sample_rate,
                                     struct GsFrame **out);

// Number of samples in the frame, or 0 for a null handle.
//
// # Safety
//
// `frame` must be null or a live handle from a `gs_frame_*` constructor.
size_t gs_frame_len(const struct GsFrame *frame);

// Releases a frame handle. Null is accepted and ignored.
//
// # Safety
//
// `frame` must be null or a live handle from a `gs_frame_*` constructor,
// and must not be used after this call.
void gs_frame_free(struct GsFrame *frame);

// Runs the causal-anticausal decomposition on one frame and returns the
// glottal (anticausal) component estimate.
//
// `n_fft` sets the cepstral transform size for the CC backend (power of
// two, at least 4x the frame length; 4096 is the usual choice) and is
// ignored by the ZZT backend. On success `*out` owns the estimate;
// release it with [`gs_estimate_free`].
//
// # Safety
//
// `frame` must be a live frame handle and `out` a writable pointer slot;
// the handle written to `*out` must be freed exactly once.
enum GsStatus gs_estimate_glottal(const struct GsFrame *frame,
                                  enum GsBackend backend,
                                  size_t n_fft,
                                  struct GsEstimate **out);

// Number of samples in the estimate, or 0 for a null handle.
//
// # Safety
//
// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
size_t gs_estimate_len(const struct GsEstimate *estimate);

// Whether the frame had no anticausal content at all (the estimate
// degenerates to an impulse). Returns 0 for a null handle.
//
// # Safety
//
// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
uint8_t gs_estimate_no_anticausal(const struct GsEstimate *estimate);

// Whether the cepstral backend hit an ambiguous phase-unwrapping step
// on this frame (always 0 for ZZT). Returns 0 for a null handle.
//
// # Safety
//
// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
uint8_t gs_estimate_phase_warning(const struct GsEstimate *estimate);

// Copies the estimate's waveform into a caller-owned buffer.
//
// The samples end at the component origin (the glottal closure instant),
// origin sample normalized to 1. `out_len` must be at least
// [`gs_estimate_len`]; exactly that many doubles are written.
//
// # Safety
//
// `estimate` must be a live handle and `out` must point to `out_len`
// writable doubles.
enum GsStatus gs_estimate_copy(const struct GsEstimate *estimate, double *out, size_t out_len);

// Releases an estimate handle. Null is accepted and ignored.
//
// # Safety
//
// `estimate` must be null or a live handle from [`gs_estimate_glottal`],
// and must not be used after this call.
void gs_estimate_free(struct GsEstimate *estimate);

// Computes voice-quality features of a glottal-source estimate waveform.
//
// Pass the estimate's samples (for example from [`gs_estimate_copy`])
// with their sample rate. `f0_hz` enables the pitch-dependent features
// (NAQ, H1-H2, HRF); pass NaN or a non-positive value when the pitch is
// unknown and those come back NaN. `cog_threshold_hz` sets the validity
// boundary (NaN or non-positive selects the default 2750 Hz) and
// `max_harmonics` caps the HRF sum (0 selects the default 20).
//
// # Safety
//
// `samples` must point to `len` readable doubles and `out` to a
// writable `GsFeatures`.
enum GsStatus gs_extract_features(const double *samples,
                                  size_t len,
                                  uint32_t sample_rate,
                                  double f0_hz,
                                  double cog_threshold_hz,
                                  uint32_t max_harmonics,
                                  struct GsFeatures *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLOTSEP_H */
