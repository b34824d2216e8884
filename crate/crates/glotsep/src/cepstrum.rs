//! Causal–anticausal decomposition via the complex cepstrum.
//!
//! The complex cepstrum `ŝ(n)` is the inverse transform of
//! `ln S(ω) = ln|S(ω)| + j·φ(ω)` with the phase unwrapped to a continuous
//! function and its integer linear-phase slope removed. Causal zeros of
//! the frame polynomial contribute only to positive quefrencies and
//! anticausal zeros only to negative ones, so zeroing one side of the
//! cepstrum (liftering) and transforming back isolates the corresponding
//! component — the same split the zero-factoring backend computes by
//! polynomial rooting, here obtained with FFTs alone.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::AnalysisFrame;
use crate::spectrum::{fft_forward, fft_inverse};
use crate::GlottalEstimate;

/// Any spectral magnitude below this is treated as a hard zero of the
/// frame spectrum, where the log is undefined.
const SPECTRAL_ZERO: f64 = 1e-300;

/// Log-spectrum ceiling before the inverse `exp` would run toward f64
/// overflow.
const LOG_SPEC_MAX: f64 = 300.0;

/// Adjacent-bin phase steps closer than this to ±π make the unwrapping
/// branch choice ambiguous and flag the frame.
const PHASE_AMBIGUITY_MARGIN: f64 = 0.2;

/// Complex cepstrum of one frame on a finite quefrency grid.
#[derive(Debug, Clone)]
pub struct ComplexCepstrum {
    /// Cepstrum values in FFT index order: index `k < n_fft/2` holds
    /// quefrency `n = k`, index `k ≥ n_fft/2` holds `n = k − n_fft`.
    pub values: Vec<f64>,
    pub n_fft: usize,
    /// Integer linear-phase slope `r` removed from the unwrapped phase
    /// (`r ≈ −delay` of the frame content relative to index 0); the
    /// inverse transform re-applies it.
    pub removed_linear_phase: i64,
    /// Whether the spectrum was negated to make the DC value positive
    /// before taking the log; re-applied on inversion.
    pub negated: bool,
    /// Set when some adjacent-bin phase step fell within
    /// [`PHASE_AMBIGUITY_MARGIN`] of ±π.
    pub phase_warning: bool,
}

impl ComplexCepstrum {
    /// Value at quefrency `n ∈ [−n_fft/2, n_fft/2 − 1]`.
    pub fn value_at(&self, n: i64) -> f64 {
        let half = (self.n_fft / 2) as i64;
        assert!(
            (-half..half).contains(&n),
            "quefrency {n} outside [{}, {}]",
            -half,
            half - 1
        );
        let k = if n < 0 { n + self.n_fft as i64 } else { n };
        self.values[k as usize]
    }
}

/// Which quefrency half-line a lifter keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifterSide {
    /// Keeps `n ≥ 0`, including `ŝ(0)` — the gain stays causal, matching
    /// the zero-factoring backend's convention.
    Causal,
    /// Keeps strictly `n < 0`.
    Anticausal,
}

/// Forward complex cepstrum: FFT, log magnitude, sequential phase
/// unwrapping with integer linear-phase removal, inverse FFT.
///
/// `n_fft` must be a power of two at least four times the frame length;
/// the margin keeps cepstral aliasing (the quefrency grid is circular)
/// from folding one component onto the other. Values on the grid differ
/// from the analytic cepstrum by that truncation/aliasing error, which
/// shrinks as `n_fft` grows.
pub fn complex_cepstrum(frame: &AnalysisFrame, n_fft: usize) -> Result<ComplexCepstrum> {
    let n = frame.windowed_samples.len();
    if !n_fft.is_power_of_two() {
        return Err(Error::param("n_fft", format!("{n_fft} is not a power of two")));
    }
    if n_fft < 4 * n {
        return Err(Error::param(
            "n_fft",
            format!("{n_fft} is less than 4× the frame length {n}"),
        ));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for (b, &s) in buf.iter_mut().zip(&frame.windowed_samples) {
        b.re = s;
    }
    fft_forward(&mut buf);
    let negated = buf[0].re < 0.0;
    if negated {
        for b in &mut buf {
            *b = -*b;
        }
    }
    let half = n_fft / 2;
    for (k, b) in buf.iter().take(half + 1).enumerate() {
        if b.norm() < SPECTRAL_ZERO {
            return Err(Error::Numerical(format!(
                "spectral zero at bin {k} ({:.1} Hz scale): the log spectrum is undefined; \
                 a different analysis window may avoid the zero",
                k as f64 / n_fft as f64
            )));
        }
    }

    // Sequential unwrap over bins 0..=half. DC phase is pinned to zero
    // (the DC value is positive real after the sign fix).
    let mut unwrapped = vec![0.0f64; half + 1];
    let mut prev_raw = 0.0f64;
    let mut phase_warning = false;
    for k in 1..=half {
        let raw = buf[k].arg();
        let mut d = raw - prev_raw;
        d -= (d / TAU).round() * TAU;
        if (d.abs() - PI).abs() < PHASE_AMBIGUITY_MARGIN {
            phase_warning = true;
        }
        unwrapped[k] = unwrapped[k - 1] + d;
        prev_raw = raw;
    }
    let r = (unwrapped[half] / PI).round() as i64;

    // Log spectrum with the slope removed, mirrored to full length so the
    // inverse transform is real.
    let mut log_spec = vec![Complex64::new(0.0, 0.0); n_fft];
    for k in 0..=half {
        let ph = unwrapped[k] - r as f64 * TAU * k as f64 / n_fft as f64;
        log_spec[k] = Complex64::new(buf[k].norm().ln(), ph);
    }
    log_spec[0].im = 0.0;
    log_spec[half].im = 0.0;
    for k in half + 1..n_fft {
        log_spec[k] = log_spec[n_fft - k].conj();
    }
    fft_inverse(&mut log_spec);
    Ok(ComplexCepstrum {
        values: log_spec.iter().map(|c| c.re).collect(),
        n_fft,
        removed_linear_phase: r,
        negated,
        phase_warning,
    })
}

/// Zeroes one quefrency half-line. The two sides partition the index set
/// (`ŝ(0)` goes with the causal side), so the two liftered cepstra sum
/// back to the original exactly.
pub fn lifter(cc: &ComplexCepstrum, side: LifterSide) -> ComplexCepstrum {
    let half = cc.n_fft / 2;
    let mut values = cc.values.clone();
    match side {
        LifterSide::Causal => {
            for v in &mut values[half..] {
                *v = 0.0;
            }
        }
        LifterSide::Anticausal => {
            for v in &mut values[..half] {
                *v = 0.0;
            }
        }
    }
    ComplexCepstrum {
        values,
        n_fft: cc.n_fft,
        removed_linear_phase: cc.removed_linear_phase,
        negated: cc.negated,
        phase_warning: cc.phase_warning,
    }
}

/// Inverse of [`complex_cepstrum`]: FFT, `exp`, re-apply the linear phase
/// and sign, inverse FFT. Returns the first `out_length` samples.
///
/// Without liftering this reproduces the (zero-padded) frame; branch
/// errors a sequential unwrap might have made enter the phase only as
/// multiples of 2π and vanish under `exp`, so the round trip holds even
/// for frames whose unwrapping was flagged.
pub fn inverse_cepstrum(cc: &ComplexCepstrum, out_length: usize) -> Result<Vec<f64>> {
    if out_length > cc.n_fft {
        return Err(Error::param(
            "out_length",
            format!("{out_length} exceeds the transform size {}", cc.n_fft),
        ));
    }
    let mut spec: Vec<Complex64> = cc
        .values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_forward(&mut spec);
    let max_log = spec.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    if max_log > LOG_SPEC_MAX {
        return Err(Error::Numerical(format!(
            "log-spectrum maximum {max_log:.1} exceeds {LOG_SPEC_MAX}: exp would overflow"
        )));
    }
    let n_fft = cc.n_fft as f64;
    for (k, b) in spec.iter_mut().enumerate() {
        let mut s = b.exp();
        s *= Complex64::from_polar(1.0, cc.removed_linear_phase as f64 * TAU * k as f64 / n_fft);
        if cc.negated {
            s = -s;
        }
        *b = s;
    }
    fft_inverse(&mut spec);
    Ok(spec.iter().take(out_length).map(|c| c.re).collect())
}

/// Full source-estimation pipeline: forward cepstrum, anticausal lifter,
/// inverse transform, then truncation at the component origin and
/// origin-normalization (origin value 1, matching the zero-factoring
/// backend's scale convention).
///
/// The removed linear-phase slope `r` locates the origin: the re-aligned
/// anticausal component occupies indices `0..=−r` of the inverse
/// transform, ending at the glottal closure instant. A non-negative `r`
/// means no anticausal content was found and a unit impulse is returned
/// with the `no_anticausal` flag set.
pub fn estimate_glottal_cc(frame: &AnalysisFrame, n_fft: usize) -> Result<GlottalEstimate> {
    let cc = complex_cepstrum(frame, n_fft)?;
    if cc.removed_linear_phase >= 0 {
        return Ok(GlottalEstimate {
            samples: vec![1.0],
            no_anticausal: true,
            phase_warning: cc.phase_warning,
        });
    }
    let origin = ((-cc.removed_linear_phase) as usize).min(n_fft - 1);
    let anticausal = lifter(&cc, LifterSide::Anticausal);
    let buf = inverse_cepstrum(&anticausal, origin + 1)?;
    let v = buf[origin];
    if !v.is_finite() || v.abs() < 1e-150 {
        return Err(Error::Numerical(format!(
            "degenerate origin value {v:.3e} in the anticausal estimate"
        )));
    }
    Ok(GlottalEstimate {
        samples: buf.iter().map(|x| x / v).collect(),
        no_anticausal: false,
        phase_warning: cc.phase_warning,
    })
}
