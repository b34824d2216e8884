//! Signal containers, the two-cosine analysis window family and
//! GCI-centered frame extraction.
//!
//! The window family is
//!
//! ```text
//! w(n) = α/2 − 1/2·cos(2πn/(N−1)) + (1−α)/2·cos(4πn/(N−1)),   α ∈ [0.7, 1]
//! ```
//!
//! which contains the Hanning (α = 1) and Blackman (α = 0.84) windows as
//! special cases. Below α = 0.7 the window takes negative values, which the
//! decomposition must avoid, so the lower bound is enforced. Both endpoints
//! cancel to exactly zero and the midpoint of an odd-length window is exactly
//! one.
//!
//! Analysis frames are centered on glottal closure instants (GCIs): the
//! causal/anticausal split downstream is only meaningful when the window
//! center coincides with the excitation instant.

use crate::error::{Error, Result};

/// A mono signal with its sample rate.
///
/// Samples are dimensionless amplitudes, nominally in `[-1, 1]` for audio
/// read from files; synthetic signals may exceed that range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl SampleBuffer {
    /// Validates finiteness of every sample and positivity of the rate.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::param(
                "samples",
                format!("non-finite value at index {i}"),
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Shape (`alpha`) and length of an analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub alpha: f64,
    pub length: usize,
}

impl WindowSpec {
    pub const MIN_ALPHA: f64 = 0.7;
    pub const MAX_ALPHA: f64 = 1.0;
    pub const MIN_LENGTH: usize = 8;

    pub fn new(alpha: f64, length: usize) -> Result<Self> {
        if !(Self::MIN_ALPHA..=Self::MAX_ALPHA).contains(&alpha) {
            return Err(Error::param(
                "alpha",
                format!("{alpha} outside [{}, {}]", Self::MIN_ALPHA, Self::MAX_ALPHA),
            ));
        }
        if length < Self::MIN_LENGTH {
            return Err(Error::param(
                "length",
                format!("{length} below minimum {}", Self::MIN_LENGTH),
            ));
        }
        Ok(Self { alpha, length })
    }
}

/// One windowed, GCI-centered analysis frame.
///
/// `gci_index` is the offset of the GCI inside `windowed_samples`; for
/// GCI-centered framing it is `(N−1)/2` (integer division), which for even
/// `N` sits half a sample left of the exact center. `window` is `None` for
/// frames built directly from raw samples (used by synthetic tests).
#[derive(Debug, Clone)]
pub struct AnalysisFrame {
    pub windowed_samples: Vec<f64>,
    pub gci_index: usize,
    pub period_samples: usize,
    pub window: Option<WindowSpec>,
    pub sample_rate: u32,
}

impl AnalysisFrame {
    /// Wraps raw samples as a frame without applying a window.
    ///
    /// Intended for synthetic inputs in tests and for callers that have
    /// already windowed their data. Requires at least two samples (a frame
    /// polynomial needs degree ≥ 1) and finite values.
    pub fn from_raw(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::param("samples", "need at least 2 samples"));
        }
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::param(
                "samples",
                format!("non-finite value at index {i}"),
            ));
        }
        let n = samples.len();
        Ok(Self {
            windowed_samples: samples,
            gci_index: (n - 1) / 2,
            period_samples: n / 2,
            window: None,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.windowed_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windowed_samples.is_empty()
    }
}

/// Evaluates the window family for `spec`.
///
/// The two cosine terms cancel the constant term exactly at both endpoints
/// (α/2 − 1/2 + (1−α)/2 = 0). The endpoint samples are pinned to literal
/// `0.0` so that downstream exact-zero trimming never depends on libm
/// rounding; everything in between is evaluated directly.
pub fn make_window(spec: &WindowSpec) -> Vec<f64> {
    let n = spec.length;
    let a = spec.alpha;
    let nm = (n - 1) as f64;
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate().take(n - 1).skip(1) {
        let x = i as f64 / nm;
        *wi = a / 2.0 - 0.5 * (2.0 * std::f64::consts::PI * x).cos()
            + (1.0 - a) / 2.0 * (4.0 * std::f64::consts::PI * x).cos();
    }
    w
}

/// Cuts a `round(periods · period_samples)`-long window centered on
/// `gci_sample` out of `signal` and applies the window family.
///
/// Frames that would overrun either signal edge are rejected (callers skip
/// them); zero-padding would distort the zero pattern the decomposition
/// depends on.
pub fn extract_frame(
    signal: &SampleBuffer,
    gci_sample: usize,
    period_samples: usize,
    alpha: f64,
    periods: f64,
) -> Result<AnalysisFrame> {
    if period_samples == 0 {
        return Err(Error::param("period_samples", "must be positive"));
    }
    if !(periods > 0.0) {
        return Err(Error::param("periods", "must be positive"));
    }
    let n = (periods * period_samples as f64).round() as usize;
    let spec = WindowSpec::new(alpha, n)?;
    let gci_index = (n - 1) / 2;
    let start = gci_sample.checked_sub(gci_index).ok_or_else(|| {
        Error::OutOfBounds(format!(
            "frame of length {n} centered at sample {gci_sample} starts before the signal"
        ))
    })?;
    let end = start + n;
    if end > signal.len() {
        return Err(Error::OutOfBounds(format!(
            "frame of length {n} centered at sample {gci_sample} ends at {end}, \
             beyond signal length {}",
            signal.len()
        )));
    }
    let w = make_window(&spec);
    let windowed_samples: Vec<f64> = signal.samples[start..end]
        .iter()
        .zip(&w)
        .map(|(x, wi)| x * wi)
        .collect();
    Ok(AnalysisFrame {
        windowed_samples,
        gci_index,
        period_samples,
        window: Some(spec),
        sample_rate: signal.sample_rate,
    })
}

/// Full linear convolution, `|a| + |b| − 1` output samples.
///
/// Direct summation: every input pair contributes one exact product, so the
/// delta-identity and small-integer cases are bit-exact, and the largest
/// sequences convolved in this crate (reconstruction checks on ~500-sample
/// frames) stay cheap.
pub fn convolve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("input", "convolve requires non-empty inputs"));
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    Ok(out)
}
