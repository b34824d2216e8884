//! Causal–anticausal decomposition by zeros of the frame z-transform.
//!
//! A frame `s(0..N−1)` with `s(0) ≠ 0` defines the degree-(N−1) polynomial
//! `S(z) = s(0)·z^{N−1} + s(1)·z^{N−2} + … + s(N−1)`, so
//! `S(z) = s(0) · z^{−(N−1)} · ∏_k (z − Z_k)` over its N−1 zeros. Zeros
//! outside the unit circle carry the anticausal (maximum-phase) component
//! of the frame — for well-windowed voiced speech, the glottal open phase —
//! while zeros inside carry the causal (minimum-phase) component, dominated
//! by the vocal tract. Splitting the zero set by modulus and re-expanding
//! each subset factors the frame into the two components exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rootfind::{expand_roots, leja_order, polynomial_roots};
use crate::signal::AnalysisFrame;

/// Roots with modulus in `(1, 1 + UNIT_CIRCLE_TOL]` are assigned to the
/// causal set (and counted per frame): genuinely-on-circle zeros are
/// measure-zero but numerically real, and sending them causal avoids
/// manufacturing spurious glottal energy.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;

/// The zero-based factorization of one analysis frame.
#[derive(Debug, Clone)]
pub struct ZztRepresentation {
    /// Leading sample of the zero-trimmed frame (the overall scale of the
    /// factorization; see [`causal_signal`] for how it is attached).
    pub gain: f64,
    /// Zeros with modulus ≤ 1 + [`UNIT_CIRCLE_TOL`].
    pub causal_zeros: Vec<Complex64>,
    /// Zeros with modulus > 1 + [`UNIT_CIRCLE_TOL`].
    pub anticausal_zeros: Vec<Complex64>,
    /// Length of the frame after exact-zero trimming; the zero counts
    /// satisfy `causal + anticausal = frame_length − 1`.
    pub frame_length: usize,
    /// Number of exactly-zero samples removed from the frame start
    /// (window onset), recorded so callers can restore alignment.
    pub leading_trim: usize,
    /// Number of exactly-zero samples removed from the frame end.
    pub trailing_trim: usize,
    /// How many causal zeros fell in the `(1, 1+tol]` tie zone.
    pub tie_zone_count: usize,
}

impl ZztRepresentation {
    /// True when the frame had no zeros outside the unit circle, i.e. no
    /// anticausal component exists and [`anticausal_signal`] degenerates
    /// to a unit impulse.
    pub fn is_min_phase_only(&self) -> bool {
        self.anticausal_zeros.is_empty()
    }

    /// `κ = ∏(−Z_AC)`: the constant coefficient of the expanded
    /// anticausal factor. Real for real frames (conjugate pairing);
    /// the tiny imaginary residue is dropped.
    fn anticausal_constant(&self) -> f64 {
        expand_roots(&leja_order(&self.anticausal_zeros))
            .last()
            .expect("expansion of any root set has at least one coefficient")
            .re
    }
}

/// Factors the frame polynomial into causal and anticausal zero sets.
///
/// Exactly-zero samples at the frame ends (window endpoints are exact
/// zeros by construction) are trimmed first and their counts recorded;
/// a nonzero leading sample is what makes the factorization above valid.
pub fn compute_zzt(frame: &AnalysisFrame) -> Result<ZztRepresentation> {
    let samples = &frame.windowed_samples;
    let leading_trim = samples.iter().take_while(|&&s| s == 0.0).count();
    if leading_trim == samples.len() {
        return Err(Error::param("frame", "all samples are zero"));
    }
    let trailing_trim = samples.iter().rev().take_while(|&&s| s == 0.0).count();
    let trimmed = &samples[leading_trim..samples.len() - trailing_trim];
    if trimmed.len() < 2 {
        return Err(Error::param(
            "frame",
            "fewer than two samples remain after trimming end zeros",
        ));
    }
    let roots = polynomial_roots(trimmed)?;
    let mut causal_zeros = Vec::new();
    let mut anticausal_zeros = Vec::new();
    let mut tie_zone_count = 0usize;
    for r in roots {
        let m = r.norm();
        if m > 1.0 + UNIT_CIRCLE_TOL {
            anticausal_zeros.push(r);
        } else {
            if m > 1.0 {
                tie_zone_count += 1;
            }
            causal_zeros.push(r);
        }
    }
    Ok(ZztRepresentation {
        gain: trimmed[0],
        causal_zeros,
        anticausal_zeros,
        frame_length: trimmed.len(),
        leading_trim,
        trailing_trim,
        tie_zone_count,
    })
}

/// Time signal of the anticausal component, normalized to 1 at its origin.
///
/// The natural support is `M_o + 1` samples ending at the component's
/// origin (stored last): the expansion of `∏(z − Z_AC)` divided by its
/// constant coefficient `κ`, so the split of overall scale between the two
/// components is fixed by convention — downstream shape measures are
/// scale-invariant, and [`causal_signal`] absorbs the full gain. When
/// `out_length` exceeds the natural support the front is zero-padded;
/// when it is shorter, the low-energy front is dropped. A frame with no
/// anticausal zeros yields a unit impulse at the origin.
pub fn anticausal_signal(zzt: &ZztRepresentation, out_length: usize) -> Vec<f64> {
    let coeffs = expand_roots(&leja_order(&zzt.anticausal_zeros));
    let kappa = coeffs.last().unwrap().re;
    let natural: Vec<f64> = coeffs.iter().map(|c| c.re / kappa).collect();
    let mut out = vec![0.0; out_length];
    let n = natural.len().min(out_length);
    // Right-align: the origin sample stays last.
    out[out_length - n..].copy_from_slice(&natural[natural.len() - n..]);
    out
}

/// Time signal of the causal component, origin first.
///
/// Expansion of `∏(z − Z_C)` scaled by `gain·κ`, where `κ` compensates the
/// normalization of [`anticausal_signal`]: convolving the two component
/// signals reproduces the trimmed frame exactly. Natural support is
/// `M_i + 1` samples starting at the origin; `out_length` zero-pads or
/// truncates the decaying tail.
pub fn causal_signal(zzt: &ZztRepresentation, out_length: usize) -> Vec<f64> {
    let scale = zzt.gain * zzt.anticausal_constant();
    let coeffs = expand_roots(&leja_order(&zzt.causal_zeros));
    let mut out = vec![0.0; out_length];
    let n = coeffs.len().min(out_length);
    for (o, c) in out.iter_mut().zip(coeffs.iter().take(n)) {
        *o = scale * c.re;
    }
    out
}

/// Complex cepstrum of the frame evaluated analytically from the zero
/// sets, indexed `n_min..=n_max`.
///
/// With the forward-transform sign convention used across this crate
/// (time sample `n` pairs with `e^{−jωn}`), the log of the factorization
/// expands to
///
/// * `ŝ(0) = ln|gain · κ|`,
/// * `ŝ(n) = −Σ_k Z_{C,k}^n / n` for `n > 0`,
/// * `ŝ(n) = +Σ_k Z_{AC,k}^n / n` for `n < 0`.
///
/// The sums are real for real frames (conjugate pairing; imaginary residue
/// below 1e−8) and real parts are returned. Unlike the FFT route, there is
/// no quefrency-grid truncation.
pub fn roots_to_cepstrum(zzt: &ZztRepresentation, n_min: i64, n_max: i64) -> Result<Vec<f64>> {
    if n_min > n_max {
        return Err(Error::param(
            "n_min",
            format!("range [{n_min}, {n_max}] is empty"),
        ));
    }
    let mut out = Vec::with_capacity((n_max - n_min + 1) as usize);
    // Rolling powers keep the cost linear in the range width.
    let mut c_pow: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); zzt.causal_zeros.len()];
    let mut ac_pow: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); zzt.anticausal_zeros.len()];
    let mut positive = Vec::new();
    for n in 1..=n_max.max(0) {
        let mut sum = Complex64::new(0.0, 0.0);
        for (p, z) in c_pow.iter_mut().zip(&zzt.causal_zeros) {
            *p *= z;
            sum += *p;
        }
        positive.push(-sum.re / n as f64);
    }
    let mut negative = Vec::new();
    for n in 1..=(-n_min).max(0) {
        let mut sum = Complex64::new(0.0, 0.0);
        for (p, z) in ac_pow.iter_mut().zip(&zzt.anticausal_zeros) {
            *p *= z.inv();
            sum += *p;
        }
        negative.push(-sum.re / n as f64);
    }
    for n in n_min..=n_max {
        out.push(match n {
            0 => (zzt.gain * zzt.anticausal_constant()).abs().ln(),
            n if n > 0 => positive[(n - 1) as usize],
            n => negative[(-n - 1) as usize],
        });
    }
    Ok(out)
}
