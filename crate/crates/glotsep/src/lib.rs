//! Glottal source estimation from voiced speech by causal–anticausal
//! decomposition.
//!
//! Voiced speech around a glottal closure instant (GCI) separates, under a
//! suitable analysis window, into an anticausal (maximum-phase) component
//! carrying the open phase of the glottal flow derivative and a causal
//! (minimum-phase) component carrying the vocal-tract response and return
//! phase. This crate estimates the glottal component with two equivalent
//! backends:
//!
//! * [`zzt`] — factor the frame polynomial and split its zeros by modulus
//!   against the unit circle;
//! * [`cepstrum`] — complex cepstrum with phase unwrapping; negative
//!   quefrencies hold exactly the anticausal information.
//!
//! Around the decomposition sit an LF-model synthesizer with an all-pole
//! vocal tract ([`lf`]) providing ground truth, windowed GCI-centered
//! framing ([`signal`]), voice-quality and decomposition-quality measures
//! ([`metrics`]), reproducible parameter-sweep experiments ([`harness`]),
//! and WAV/annotation I/O for the CLI ([`io`]).

pub mod cepstrum;
pub mod error;
pub mod harness;
pub mod io;
pub mod lf;
pub mod metrics;
mod rootfind;
pub mod signal;
pub mod spectrum;
pub mod zzt;

pub use error::{Error, Result};
pub use signal::{extract_frame, AnalysisFrame, SampleBuffer, WindowSpec};

/// Which decomposition backend to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Zeros of the frame z-transform: polynomial rooting, exact split.
    Zzt,
    /// Complex cepstrum: FFT-based, fast at high pitch, subject to the
    /// quefrency grid's truncation error.
    Cc,
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::Zzt => "zzt",
            Backend::Cc => "cc",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "zzt" => Ok(Backend::Zzt),
            "cc" => Ok(Backend::Cc),
            other => Err(Error::param(
                "backend",
                format!("unknown backend {other:?}, expected zzt or cc"),
            )),
        }
    }
}

/// An estimated glottal-source waveform for one frame.
///
/// `samples` end at the component origin (the glottal closure instant)
/// and are normalized so the origin sample is 1; the shared scale of the
/// decomposition stays with the causal component.
#[derive(Debug, Clone)]
pub struct GlottalEstimate {
    pub samples: Vec<f64>,
    /// The frame had no anticausal content; `samples` degenerate to an
    /// impulse.
    pub no_anticausal: bool,
    /// The cepstral backend found an ambiguous phase-unwrapping step
    /// (always `false` for the zero-factoring backend).
    pub phase_warning: bool,
}

/// Runs one frame through the selected backend.
///
/// `n_fft` sets the cepstral transform size (power of two, ≥ 4× frame
/// length); the zero-factoring backend works in the time domain and
/// ignores it.
pub fn estimate_glottal(
    frame: &AnalysisFrame,
    backend: Backend,
    n_fft: usize,
) -> Result<GlottalEstimate> {
    match backend {
        Backend::Cc => cepstrum::estimate_glottal_cc(frame, n_fft),
        Backend::Zzt => {
            let z = zzt::compute_zzt(frame)?;
            let samples = zzt::anticausal_signal(&z, z.anticausal_zeros.len() + 1);
            Ok(GlottalEstimate {
                samples,
                no_anticausal: z.is_min_phase_only(),
                phase_warning: false,
            })
        }
    }
}
