//! C ABI for the glotsep causal-anticausal decomposition library.
//!
//! Every function is callable from C (and anything with a C FFI): handles
//! are opaque pointers created and released by `_new`/`_free` pairs,
//! failures come back as [`GsStatus`] codes with a thread-local message
//! behind [`gs_last_error_message`], and waveform data crosses the
//! boundary as caller-owned `double` buffers. The generated header lands
//! in `include/glotsep.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use glotsep::metrics::{extract_features, FeatureConfig};
use glotsep::signal::extract_frame;
use glotsep::{estimate_glottal, AnalysisFrame, Backend, Error, GlottalEstimate, SampleBuffer};

/// Status code of every fallible call.
///
/// The numeric values mirror the CLI's exit codes for the same failure
/// classes, with an extra code for null handles or buffers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum GsStatus {
    /// The call succeeded.
    GS_OK = 0,
    /// A parameter violates a documented precondition.
    GS_ERR_PARAM = 1,
    /// Input data has an unsupported or malformed layout.
    GS_ERR_FORMAT = 2,
    /// A numerical computation failed.
    GS_ERR_NUMERICAL = 3,
    /// A required pointer argument was null.
    GS_ERR_NULL = 4,
}

/// Decomposition backend selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum GsBackend {
    /// Factor the frame polynomial and split its zeros against the unit
    /// circle.
    GS_BACKEND_ZZT = 0,
    /// Complex cepstrum with phase unwrapping.
    GS_BACKEND_CC = 1,
}

/// Voice-quality features of one glottal-source estimate.
///
/// Features that are undefined for the given input (no pitch supplied,
/// no resolvable harmonic, no spectral peak) are NaN; `valid` is 1 when
/// the estimate's spectral center of gravity stays at or below the
/// configured threshold and 0 otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GsFeatures {
    pub fg_hz: f64,
    pub bw_hz: f64,
    pub naq: f64,
    pub h1h2_db: f64,
    pub hrf_db: f64,
    pub cog_hz: f64,
    pub valid: u8,
}

/// Opaque analysis frame handle.
pub struct GsFrame(AnalysisFrame);

/// Opaque glottal-estimate handle.
pub struct GsEstimate(GlottalEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> GsStatus {
    match err.exit_code() {
        1 => GsStatus::GS_ERR_PARAM,
        2 => GsStatus::GS_ERR_FORMAT,
        _ => GsStatus::GS_ERR_NUMERICAL,
    }
}

fn fail(err: Error) -> GsStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_arg(name: &str) -> GsStatus {
    set_error(format!("argument `{name}` is null"));
    GsStatus::GS_ERR_NULL
}

/// Runs a fallible body, translating any panic into a numerical-failure
/// status so unwinding never crosses the ABI boundary.
fn guarded<F: FnOnce() -> GsStatus>(body: F) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            GsStatus::GS_ERR_NUMERICAL
        }
    }
}

/// Version of the underlying library as a static, null-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread, or
/// null when the last call on this thread succeeded.
///
/// The pointer stays valid until the next glotsep call on the same
/// thread; copy the string if it must outlive that.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |message| message.as_ptr())
    })
}

/// Cuts a windowed GCI-centered analysis frame out of a speech signal.
///
/// `gci_sample` is the index of the glottal closure instant inside
/// `samples`, `period_samples` the local pitch period, `alpha` the window
/// shape in [0.7, 1.0] (1.0 = Hanning) and `periods` the window length in
/// pitch periods. On success `*out` owns the new frame; release it with
/// [`gs_frame_free`].
///
/// # Safety
///
/// `samples` must point to `len` readable doubles and `out` to a writable
/// pointer slot; the handle written to `*out` must be freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn gs_frame_from_signal(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    gci_sample: usize,
    period_samples: usize,
    alpha: f64,
    periods: f64,
    out: *mut *mut GsFrame,
) -> GsStatus {
    clear_error();
    if out.is_null() {
        return null_arg("out");
    }
    unsafe { *out = ptr::null_mut() };
    if samples.is_null() {
        return null_arg("samples");
    }
    let input = unsafe { std::slice::from_raw_parts(samples, len) }.to_vec();
    guarded(|| {
        let buffer = match SampleBuffer::new(input, sample_rate) {
            Ok(b) => b,
            Err(e) => return fail(e),
        };
        match extract_frame(&buffer, gci_sample, period_samples, alpha, periods) {
            Ok(frame) => {
                unsafe { *out = Box::into_raw(Box::new(GsFrame(frame))) };
                GsStatus::GS_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Wraps already-windowed samples as an analysis frame.
///
/// For callers that apply their own window; the decomposition treats the
/// samples as-is. On success `*out` owns the new frame; release it with
/// [`gs_frame_free`].
///
/// # Safety
///
/// `samples` must point to `len` readable doubles and `out` to a writable
/// pointer slot; the handle written to `*out` must be freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn gs_frame_from_windowed(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    out: *mut *mut GsFrame,
) -> GsStatus {
    clear_error();
    if out.is_null() {
        return null_arg("out");
    }
    unsafe { *out = ptr::null_mut() };
    if samples.is_null() {
        return null_arg("samples");
    }
    let input = unsafe { std::slice::from_raw_parts(samples, len) }.to_vec();
    guarded(|| match AnalysisFrame::from_raw(input, sample_rate) {
        Ok(frame) => {
            unsafe { *out = Box::into_raw(Box::new(GsFrame(frame))) };
            GsStatus::GS_OK
        }
        Err(e) => fail(e),
    })
}

/// Number of samples in the frame, or 0 for a null handle.
///
/// # Safety
///
/// `frame` must be null or a live handle from a `gs_frame_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn gs_frame_len(frame: *const GsFrame) -> usize {
    if frame.is_null() {
        return 0;
    }
    unsafe { &*frame }.0.windowed_samples.len()
}

/// Releases a frame handle. Null is accepted and ignored.
///
/// # Safety
///
/// `frame` must be null or a live handle from a `gs_frame_*` constructor,
/// and must not be used after this call.
#[no_mangle]
pub unsafe extern "C" fn gs_frame_free(frame: *mut GsFrame) {
    if !frame.is_null() {
        drop(unsafe { Box::from_raw(frame) });
    }
}

/// Runs the causal-anticausal decomposition on one frame and returns the
/// glottal (anticausal) component estimate.
///
/// `n_fft` sets the cepstral transform size for the CC backend (power of
/// two, at least 4x the frame length; 4096 is the usual choice) and is
/// ignored by the ZZT backend. On success `*out` owns the estimate;
/// release it with [`gs_estimate_free`].
///
/// # Safety
///
/// `frame` must be a live frame handle and `out` a writable pointer slot;
/// the handle written to `*out` must be freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_glottal(
    frame: *const GsFrame,
    backend: GsBackend,
    n_fft: usize,
    out: *mut *mut GsEstimate,
) -> GsStatus {
    clear_error();
    if out.is_null() {
        return null_arg("out");
    }
    unsafe { *out = ptr::null_mut() };
    if frame.is_null() {
        return null_arg("frame");
    }
    let frame = unsafe { &*frame };
    let backend = match backend {
        GsBackend::GS_BACKEND_ZZT => Backend::Zzt,
        GsBackend::GS_BACKEND_CC => Backend::Cc,
    };
    guarded(|| match estimate_glottal(&frame.0, backend, n_fft) {
        Ok(est) => {
            unsafe { *out = Box::into_raw(Box::new(GsEstimate(est))) };
            GsStatus::GS_OK
        }
        Err(e) => fail(e),
    })
}

/// Number of samples in the estimate, or 0 for a null handle.
///
/// # Safety
///
/// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_len(estimate: *const GsEstimate) -> usize {
    if estimate.is_null() {
        return 0;
    }
    unsafe { &*estimate }.0.samples.len()
}

/// Whether the frame had no anticausal content at all (the estimate
/// degenerates to an impulse). Returns 0 for a null handle.
///
/// # Safety
///
/// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_no_anticausal(estimate: *const GsEstimate) -> u8 {
    if estimate.is_null() {
        return 0;
    }
    unsafe { &*estimate }.0.no_anticausal as u8
}

/// Whether the cepstral backend hit an ambiguous phase-unwrapping step
/// on this frame (always 0 for ZZT). Returns 0 for a null handle.
///
/// # Safety
///
/// `estimate` must be null or a live handle from [`gs_estimate_glottal`].
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_phase_warning(estimate: *const GsEstimate) -> u8 {
    if estimate.is_null() {
        return 0;
    }
    unsafe { &*estimate }.0.phase_warning as u8
}

/// Copies the estimate's waveform into a caller-owned buffer.
///
/// The samples end at the component origin (the glottal closure instant),
/// origin sample normalized to 1. `out_len` must be at least
/// [`gs_estimate_len`]; exactly that many doubles are written.
///
/// # Safety
///
/// `estimate` must be a live handle and `out` must point to `out_len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_copy(
    estimate: *const GsEstimate,
    out: *mut f64,
    out_len: usize,
) -> GsStatus {
    clear_error();
    if estimate.is_null() {
        return null_arg("estimate");
    }
    if out.is_null() {
        return null_arg("out");
    }
    let samples = &unsafe { &*estimate }.0.samples;
    if out_len < samples.len() {
        set_error(format!(
            "output buffer holds {out_len} samples, estimate needs {}",
            samples.len()
        ));
        return GsStatus::GS_ERR_PARAM;
    }
    unsafe { std::slice::from_raw_parts_mut(out, samples.len()) }.copy_from_slice(samples);
    GsStatus::GS_OK
}

/// Releases an estimate handle. Null is accepted and ignored.
///
/// # Safety
///
/// `estimate` must be null or a live handle from [`gs_estimate_glottal`],
/// and must not be used after this call.
#[no_mangle]
pub unsafe extern "C" fn gs_estimate_free(estimate: *mut GsEstimate) {
    if !estimate.is_null() {
        drop(unsafe { Box::from_raw(estimate) });
    }
}

/// Computes voice-quality features of a glottal-source estimate waveform.
///
/// Pass the estimate's samples (for example from [`gs_estimate_copy`])
/// with their sample rate. `f0_hz` enables the pitch-dependent features
/// (NAQ, H1-H2, HRF); pass NaN or a non-positive value when the pitch is
/// unknown and those come back NaN. `cog_threshold_hz` sets the validity
/// boundary (NaN or non-positive selects the default 2750 Hz) and
/// `max_harmonics` caps the HRF sum (0 selects the default 20).
///
/// # Safety
///
/// `samples` must point to `len` readable doubles and `out` to a
/// writable `GsFeatures`.
#[no_mangle]
pub unsafe extern "C" fn gs_extract_features(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    f0_hz: f64,
    cog_threshold_hz: f64,
    max_harmonics: u32,
    out: *mut GsFeatures,
) -> GsStatus {
    clear_error();
    if out.is_null() {
        return null_arg("out");
    }
    if samples.is_null() {
        return null_arg("samples");
    }
    let input = unsafe { std::slice::from_raw_parts(samples, len) }.to_vec();
    let mut config = FeatureConfig::default();
    if f0_hz.is_finite() && f0_hz > 0.0 {
        config.f0_hz = Some(f0_hz);
    }
    if cog_threshold_hz.is_finite() && cog_threshold_hz > 0.0 {
        config.cog_threshold_hz = cog_threshold_hz;
    }
    if max_harmonics > 0 {
        config.max_harmonics = max_harmonics as usize;
    }
    guarded(|| match extract_features(&input, sample_rate, &config) {
        Ok(features) => {
            let undefined = f64::NAN;
            unsafe {
                *out = GsFeatures {
                    fg_hz: features.fg_hz.unwrap_or(undefined),
                    bw_hz: features.bw_hz.unwrap_or(undefined),
                    naq: features.naq.unwrap_or(undefined),
                    h1h2_db: features.h1h2_db.unwrap_or(undefined),
                    hrf_db: features.hrf_db.unwrap_or(undefined),
                    cog_hz: features.cog_hz,
                    valid: features.valid as u8,
                };
            }
            GsStatus::GS_OK
        }
        Err(e) => fail(e),
    })
}
