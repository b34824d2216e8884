//! Liljencrants–Fant (LF) glottal source synthesis and the all-pole vocal
//! tract, providing ground-truth glottal waveforms, GCI lists and the full
//! synthetic test grid.
//!
//! One LF cycle of the glottal flow *derivative* consists of an open phase
//! `E0·e^{αt}·sin(π t / tp)` growing toward the glottal closure instant
//! (GCI), where it reaches the negative excitation peak `−ee`, followed by
//! an exponential return phase. The derivative is synthesized directly: the
//! differentiation of the lip-radiation stage cancels against the
//! integration from flow derivative to flow, so speech is simply the
//! derivative train filtered by the all-pole tract.
//!
//! Internal coefficients are fixed by two constraints:
//! * the return-phase constant ε solves `ε·ta = 1 − e^{−ε(tc−te)}`, making
//!   the return phase land exactly at zero at the cycle end;
//! * the envelope constant α balances the open- and return-phase areas so
//!   the flow returns to baseline over each cycle (zero net integral).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rootfind::polynomial_roots;
use crate::signal::SampleBuffer;

/// Fraction of the period used as the default return-phase time constant.
pub const DEFAULT_TA_FRACTION: f64 = 0.02;

/// LF source parameters.
///
/// `oq` (open quotient) is the open-phase fraction of the period, `am` the
/// asymmetry coefficient placing the flow peak inside the open phase, `ee`
/// the (positive) excitation amplitude reached at the GCI. Ranges match the
/// synthetic-study grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LFParams {
    pub f0: f64,
    pub oq: f64,
    pub am: f64,
    pub ee: f64,
}

impl LFParams {
    pub fn new(f0: f64, oq: f64, am: f64, ee: f64) -> Result<Self> {
        if !(60.0..=180.0).contains(&f0) {
            return Err(Error::param("f0", format!("{f0} outside [60, 180] Hz")));
        }
        if !(0.4..=0.9).contains(&oq) {
            return Err(Error::param("oq", format!("{oq} outside [0.4, 0.9]")));
        }
        if !(0.6..=0.9).contains(&am) {
            return Err(Error::param("am", format!("{am} outside [0.6, 0.9]")));
        }
        if !(ee > 0.0 && ee.is_finite()) {
            return Err(Error::param("ee", "must be positive and finite"));
        }
        Ok(Self { f0, oq, am, ee })
    }
}

/// One formant of the vocal-tract stand-in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

/// The four sustained vowels of the synthetic studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vowel {
    A,
    Schwa,
    I,
    Y,
}

impl Vowel {
    pub const ALL: [Vowel; 4] = [Vowel::A, Vowel::Schwa, Vowel::I, Vowel::Y];

    /// The label used in data files and on the CLI.
    pub fn label(&self) -> &'static str {
        match self {
            Vowel::A => "a",
            Vowel::Schwa => "@",
            Vowel::I => "i",
            Vowel::Y => "y",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Vowel::A),
            "@" => Ok(Vowel::Schwa),
            "i" => Ok(Vowel::I),
            "y" => Ok(Vowel::Y),
            other => Err(Error::param(
                "vowel",
                format!("unknown vowel {other:?}, expected one of a, @, i, y"),
            )),
        }
    }

    /// Formant table for this vowel (four formants per vowel, loaded from
    /// the versioned data file compiled into the crate).
    pub fn formants(&self) -> &'static [Formant; 4] {
        &formant_table()[match self {
            Vowel::A => 0,
            Vowel::Schwa => 1,
            Vowel::I => 2,
            Vowel::Y => 3,
        }]
    }
}

/// Raw text of the formant table shipped with the crate.
const FORMANT_TABLE_SRC: &str = include_str!("../data/vowel_formants.txt");

fn formant_table() -> &'static [[Formant; 4]; 4] {
    static TABLE: OnceLock<[[Formant; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[Formant {
            frequency_hz: 0.0,
            bandwidth_hz: 0.0,
        }; 4]; 4];
        let mut filled = [[false; 4]; 4];
        for line in FORMANT_TABLE_SRC.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            assert_eq!(cols.len(), 4, "malformed formant table line: {line}");
            let vowel = match cols[0] {
                "a" => 0,
                "@" => 1,
                "i" => 2,
                "y" => 3,
                other => panic!("unknown vowel in formant table: {other}"),
            };
            let idx: usize = cols[1].parse::<usize>().unwrap() - 1;
            table[vowel][idx] = Formant {
                frequency_hz: cols[2].parse().unwrap(),
                bandwidth_hz: cols[3].parse().unwrap(),
            };
            filled[vowel][idx] = true;
        }
        assert!(
            filled.iter().flatten().all(|&f| f),
            "formant table incomplete"
        );
        table
    })
}

/// Minimum-phase all-pole vocal tract `1/A(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VocalTractModel {
    pub vowel_label: Vowel,
    /// Denominator polynomial `A(z)` in `z^{-1}`, `coefficients[0] = 1`.
    pub coefficients: Vec<f64>,
    pub sample_rate: u32,
}

impl VocalTractModel {
    /// Builds the tract as a cascade of second-order resonator sections
    /// from this vowel's formant table. The poles sit at radius
    /// `e^{−π·bw/fs}` and angle `2π·f/fs`, strictly inside the unit circle.
    pub fn from_vowel(vowel: Vowel, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        let fs = sample_rate as f64;
        let mut coefficients = vec![1.0f64];
        for f in vowel.formants() {
            if f.frequency_hz >= fs / 2.0 {
                return Err(Error::param(
                    "sample_rate",
                    format!(
                        "formant at {} Hz exceeds Nyquist for fs = {sample_rate}",
                        f.frequency_hz
                    ),
                ));
            }
            let rho = (-PI * f.bandwidth_hz / fs).exp();
            let theta = 2.0 * PI * f.frequency_hz / fs;
            let section = [1.0, -2.0 * rho * theta.cos(), rho * rho];
            let mut next = vec![0.0; coefficients.len() + 2];
            for (i, &a) in coefficients.iter().enumerate() {
                for (j, &s) in section.iter().enumerate() {
                    next[i + j] += a * s;
                }
            }
            coefficients = next;
        }
        Ok(Self {
            vowel_label: vowel,
            coefficients,
            sample_rate,
        })
    }

    /// Wraps caller-supplied denominator coefficients, verifying stability
    /// (all polynomial roots strictly inside the unit circle).
    pub fn from_coefficients(
        vowel_label: Vowel,
        coefficients: Vec<f64>,
        sample_rate: u32,
    ) -> Result<Self> {
        if coefficients.first() != Some(&1.0) {
            return Err(Error::param("coefficients", "must be monic (a[0] = 1)"));
        }
        let roots = polynomial_roots(&coefficients)?;
        if let Some(r) = roots.iter().find(|r| r.norm() >= 1.0) {
            return Err(Error::param(
                "coefficients",
                format!("unstable tract: pole at modulus {:.6}", r.norm()),
            ));
        }
        Ok(Self {
            vowel_label,
            coefficients,
            sample_rate,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// First `n` samples of the tract impulse response.
    pub fn impulse_response(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        if n > 0 {
            x[0] = 1.0;
        }
        all_pole_filter(&x, &self.coefficients)
    }
}

/// Direct-form all-pole filtering `y(n) = x(n) − Σ_k a_k · y(n−k)`,
/// starting from zero state.
pub fn all_pole_filter(x: &[f64], denominator: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0f64; x.len()];
    for n in 0..x.len() {
        let mut v = x[n];
        for k in 1..denominator.len() {
            if n >= k {
                v -= denominator[k] * y[n - k];
            }
        }
        y[n] = v;
    }
    y
}

/// A synthesized utterance with its aligned ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticUtterance {
    pub speech: SampleBuffer,
    pub glottal_derivative_truth: SampleBuffer,
    pub gci_samples: Vec<usize>,
    pub params: LFParams,
    pub tract: VocalTractModel,
}

/// Internal solved LF constants for one cycle.
struct LfConstants {
    cycle_len: usize,
    te_index: usize,
    eps: f64,
    alpha: f64,
    e0: f64,
    wg: f64,
    te: f64,
    tr: f64,
    ta: f64,
}

fn solve_lf(params: &LFParams, ta_fraction: f64, sample_rate: u32) -> Result<LfConstants> {
    let fs = sample_rate as f64;
    let cycle_len = (fs / params.f0).round() as usize;
    let te_index = (params.oq * fs / params.f0).round() as usize;
    if te_index == 0 || te_index + 1 >= cycle_len {
        return Err(Error::param(
            "oq",
            format!("open phase of {te_index} samples does not fit a {cycle_len}-sample cycle"),
        ));
    }
    let t0 = cycle_len as f64 / fs;
    let te = te_index as f64 / fs;
    let tp = params.am * te;
    let ta = ta_fraction * t0;
    let tr = t0 - te;
    if !(ta > 0.0) || tr < 2.0 * ta {
        return Err(Error::param(
            "ta_fraction",
            format!("return phase ({tr:.6}s) too short for time constant {ta:.6}s"),
        ));
    }

    // ε: Newton iteration on ε·ta − 1 + e^{−ε·tr} = 0, started at 1/ta.
    let mut eps = 1.0 / ta;
    let mut converged = false;
    for _ in 0..100 {
        let g = eps * ta - 1.0 + (-eps * tr).exp();
        let gp = ta - tr * (-eps * tr).exp();
        let step = g / gp;
        eps -= step;
        if step.abs() <= 1e-14 * eps.abs() {
            converged = true;
            break;
        }
    }
    if !converged || !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Numerical(format!(
            "return-phase solver did not converge (f0={}, oq={}, ta={ta:.3e})",
            params.f0, params.oq
        )));
    }

    // α: bisection on the net-area balance. The open-phase area has the
    // closed form E0(α)·I(α) with
    //   I(α) = (e^{α·te}(α·sin(wg·te) − wg·cos(wg·te)) + wg) / (α² + wg²),
    // and the return-phase area is fixed once ε is known. The balance
    // function decreases monotonically from +∞ to the (negative) return
    // area, so a sign-change bracket always exists.
    let wg = PI / tp;
    let swg = (wg * te).sin();
    let ee = params.ee;
    let area_return = -ee * (1.0 / eps - tr * (-eps * tr).exp() / (eps * ta));
    let balance = |alpha: f64| -> f64 {
        let i = if alpha.abs() < 1e-9 {
            (1.0 - (wg * te).cos()) / wg
        } else {
            ((alpha * te).exp() * (alpha * swg - wg * (wg * te).cos()) + wg)
                / (alpha * alpha + wg * wg)
        };
        let e0 = -ee / ((alpha * te).exp() * swg);
        e0 * i + area_return
    };
    let (mut lo, mut hi) = (-30.0 / te, 30.0 / te);
    if !(balance(lo) > 0.0 && balance(hi) < 0.0) {
        return Err(Error::Numerical(format!(
            "area-balance bracket failed (f0={}, oq={}, am={}): f(lo)={:.3e}, f(hi)={:.3e}",
            params.f0,
            params.oq,
            params.am,
            balance(lo),
            balance(hi)
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let residual = balance(alpha);
    if residual.abs() >= 1e-10 * ee.max(1.0) {
        return Err(Error::Numerical(format!(
            "area-balance residual {residual:.3e} above tolerance (f0={}, oq={}, am={})",
            params.f0, params.oq, params.am
        )));
    }
    let e0 = -ee / ((alpha * te).exp() * swg);
    Ok(LfConstants {
        cycle_len,
        te_index,
        eps,
        alpha,
        e0,
        wg,
        te,
        tr,
        ta,
    })
}

/// One cycle of the LF glottal flow derivative at the default return-phase
/// time constant (`ta = 0.02·T0`).
///
/// The cycle is `round(fs/f0)` samples long; the minimum `−ee` falls
/// exactly on the GCI sample `round(oq·fs/f0)`; the net integral over the
/// cycle is zero up to discretization.
pub fn lf_derivative_cycle(params: &LFParams, sample_rate: u32) -> Result<Vec<f64>> {
    lf_derivative_cycle_with_ta(params, DEFAULT_TA_FRACTION, sample_rate)
}

/// Same as [`lf_derivative_cycle`] with an explicit return-phase time
/// constant `ta = ta_fraction·T0`. Exposed for tests probing the
/// return-phase dependence of voice-quality measures.
pub fn lf_derivative_cycle_with_ta(
    params: &LFParams,
    ta_fraction: f64,
    sample_rate: u32,
) -> Result<Vec<f64>> {
    if sample_rate == 0 {
        return Err(Error::param("sample_rate", "must be positive"));
    }
    let c = solve_lf(params, ta_fraction, sample_rate)?;
    let fs = sample_rate as f64;
    let mut cycle = vec![0.0f64; c.cycle_len];
    for (n, v) in cycle.iter_mut().enumerate() {
        let t = n as f64 / fs;
        *v = if n < c.te_index {
            c.e0 * (c.alpha * t).exp() * (c.wg * t).sin()
        } else if n == c.te_index {
            // The GCI sample is the defining boundary value shared by both
            // phases; pin it so the excitation peak is exact.
            -params.ee
        } else {
            -params.ee / (c.eps * c.ta)
                * ((-c.eps * (t - c.te)).exp() - (-c.eps * c.tr).exp())
        };
    }
    Ok(cycle)
}

/// Synthesizes `n_periods` LF cycles through the tract.
///
/// Returns the speech, the aligned glottal-derivative ground truth and the
/// GCI sample positions. At least three periods are required so that at
/// least one GCI has a full period of context on both sides.
pub fn synthesize(
    params: &LFParams,
    tract: &VocalTractModel,
    n_periods: usize,
    sample_rate: u32,
) -> Result<SyntheticUtterance> {
    if n_periods < 3 {
        return Err(Error::param("n_periods", "need at least 3 periods"));
    }
    if tract.sample_rate != sample_rate {
        return Err(Error::param(
            "sample_rate",
            format!(
                "tract built for {} Hz, synthesis requested at {sample_rate} Hz",
                tract.sample_rate
            ),
        ));
    }
    let cycle = lf_derivative_cycle(params, sample_rate)?;
    let te_index = (params.oq * sample_rate as f64 / params.f0).round() as usize;
    let len = cycle.len();
    let mut truth = Vec::with_capacity(n_periods * len);
    let mut gci_samples = Vec::with_capacity(n_periods);
    for k in 0..n_periods {
        truth.extend_from_slice(&cycle);
        gci_samples.push(k * len + te_index);
    }
    let speech = all_pole_filter(&truth, &tract.coefficients);
    Ok(SyntheticUtterance {
        speech: SampleBuffer::new(speech, sample_rate)?,
        glottal_derivative_truth: SampleBuffer::new(truth, sample_rate)?,
        gci_samples,
        params: *params,
        tract: tract.clone(),
    })
}

/// The full synthetic test grid: pitch 60:20:180 Hz × open quotient
/// 0.4:0.05:0.9 × asymmetry 0.6:0.05:0.9 × the four vowels
/// (7 × 11 × 7 × 4 = 2156 conditions). Iteration order is vowel-major,
/// then pitch, open quotient and asymmetry, so the first element is
/// (60 Hz, 0.4, 0.6, /a/).
pub fn test_grid() -> Vec<(LFParams, Vowel)> {
    let mut grid = Vec::with_capacity(2156);
    for vowel in Vowel::ALL {
        for fi in 0..7 {
            for qi in 0..11 {
                for ai in 0..7 {
                    let params = LFParams::new(
                        60.0 + 20.0 * fi as f64,
                        0.4 + 0.05 * qi as f64,
                        0.6 + 0.05 * ai as f64,
                        1.0,
                    )
                    .expect("grid values are in range");
                    grid.push((params, vowel));
                }
            }
        }
    }
    grid
}
