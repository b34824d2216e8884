//! FFT plumbing, amplitude spectra and the fixed 2:1 feature-stage decimator.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    // Plans are cached per thread so parallel workers never share FFT
    // workspace state.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward FFT.
pub fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

/// In-place inverse FFT, normalized by 1/len (so it inverts `fft_forward`).
pub fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Smallest power of two ≥ `n`.
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// One-sided amplitude spectrum of a real signal on a zero-padded FFT grid.
///
/// `amplitudes[k]` is `|X(k)|` at frequency `k · sample_rate / n_fft` for
/// `k = 0 ..= n_fft/2`.
#[derive(Debug, Clone)]
pub struct AmplitudeSpectrum {
    pub amplitudes: Vec<f64>,
    pub sample_rate: u32,
    pub n_fft: usize,
}

impl AmplitudeSpectrum {
    /// Computes the spectrum; `n_fft` must be a power of two at least as
    /// long as the signal.
    pub fn from_signal(x: &[f64], sample_rate: u32, n_fft: usize) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::param("signal", "empty"));
        }
        if !n_fft.is_power_of_two() || n_fft < x.len() {
            return Err(Error::param(
                "n_fft",
                format!("{n_fft} must be a power of two >= signal length {}", x.len()),
            ));
        }
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(n_fft, Complex64::new(0.0, 0.0));
        fft_forward(&mut buf);
        let amplitudes = buf[..=n_fft / 2].iter().map(|c| c.norm()).collect();
        Ok(Self {
            amplitudes,
            sample_rate,
            n_fft,
        })
    }

    /// Frequency spacing between adjacent bins in Hz.
    pub fn bin_hz(&self) -> f64 {
        self.sample_rate as f64 / self.n_fft as f64
    }

    /// Center frequency of bin `k` in Hz.
    pub fn freq_at(&self, k: usize) -> f64 {
        k as f64 * self.bin_hz()
    }

    /// Index of the bin closest to `hz`.
    pub fn bin_of(&self, hz: f64) -> usize {
        ((hz / self.bin_hz()).round() as usize).min(self.amplitudes.len() - 1)
    }
}

/// Number of taps of the half-rate decimation filter.
const DECIMATOR_TAPS: usize = 127;

/// Decimates a 16 kHz signal to 8 kHz with a linear-phase windowed-sinc
/// low-pass (cutoff at the new Nyquist), group delay compensated.
///
/// Output sample `i` corresponds to input sample `2i`. This is the only
/// resampler in the crate: voice-quality features are defined on an 8 kHz
/// grid, everything else runs at the native rate.
pub fn decimate_by_2(x: &[f64]) -> Vec<f64> {
    let half = (DECIMATOR_TAPS - 1) / 2;
    // Blackman-windowed ideal half-band low-pass, h[m] for m = −half..=half.
    let mut h = vec![0.0f64; DECIMATOR_TAPS];
    for (k, hk) in h.iter_mut().enumerate() {
        let m = k as f64 - half as f64;
        let sinc = if m == 0.0 {
            0.5
        } else {
            (std::f64::consts::PI * m / 2.0).sin() / (std::f64::consts::PI * m)
        };
        let t = k as f64 / (DECIMATOR_TAPS - 1) as f64;
        let win = 0.42 - 0.5 * (2.0 * std::f64::consts::PI * t).cos()
            + 0.08 * (4.0 * std::f64::consts::PI * t).cos();
        *hk = sinc * win;
    }
    // Normalize to exactly unit DC gain so amplitudes are preserved.
    let sum: f64 = h.iter().sum();
    for hk in h.iter_mut() {
        *hk /= sum;
    }
    let out_len = x.len().div_ceil(2);
    let mut y = vec![0.0f64; out_len];
    for (i, yi) in y.iter_mut().enumerate() {
        let center = 2 * i as isize;
        let mut acc = 0.0;
        for (k, &hk) in h.iter().enumerate() {
            let idx = center + half as isize - k as isize;
            if idx >= 0 && (idx as usize) < x.len() {
                acc += hk * x[idx as usize];
            }
        }
        *yi = acc;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn fft_round_trip_is_identity() {
        let mut rng = StdRng::seed_from_u64(3);
        let x: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        fft_inverse(&mut buf);
        for (orig, got) in x.iter().zip(&buf) {
            assert!((orig - got.re).abs() < 1e-12);
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn forward_fft_matches_direct_dft_oracle() {
        // Brute-force O(n²) DFT as an independent reference.
        let mut rng = StdRng::seed_from_u64(4);
        let x: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        for k in 0..32 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &xn) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * n) as f64 / 32.0;
                acc += xn * Complex64::new(ang.cos(), ang.sin());
            }
            assert!((acc - buf[k]).norm() < 1e-10, "bin {k}");
        }
    }

    #[test]
    fn amplitude_spectrum_locates_a_pure_tone() {
        let fs = 8000u32;
        let f = 500.0;
        let x: Vec<f64> = (0..1024)
            .map(|n| (2.0 * std::f64::consts::PI * f * n as f64 / fs as f64).sin())
            .collect();
        let spec = AmplitudeSpectrum::from_signal(&x, fs, 4096).unwrap();
        let peak = spec
            .amplitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((spec.freq_at(peak) - f).abs() <= spec.bin_hz());
    }

    #[test]
    fn spectrum_validates_inputs() {
        assert!(AmplitudeSpectrum::from_signal(&[], 8000, 64).is_err());
        assert!(AmplitudeSpectrum::from_signal(&[1.0; 100], 8000, 64).is_err());
        assert!(AmplitudeSpectrum::from_signal(&[1.0; 100], 8000, 100).is_err());
    }

    #[test]
    fn decimator_preserves_a_low_tone_and_rejects_a_high_one() {
        let fs = 16000u32;
        let n = 4000;
        let low: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 300.0 * i as f64 / fs as f64).sin())
            .collect();
        let high: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 6000.0 * i as f64 / fs as f64).sin())
            .collect();
        let low_d = decimate_by_2(&low);
        let high_d = decimate_by_2(&high);
        assert_eq!(low_d.len(), 2000);
        // Interior RMS (edges excluded: the filter runs off the signal there).
        let rms = |v: &[f64]| {
            let core = &v[100..v.len() - 100];
            (core.iter().map(|x| x * x).sum::<f64>() / core.len() as f64).sqrt()
        };
        let expected = (0.5f64).sqrt();
        assert!((rms(&low_d) - expected).abs() < 0.01 * expected);
        assert!(rms(&high_d) < 1e-3);
    }

    #[test]
    fn decimator_keeps_spectral_peaks_in_place() {
        let fs = 16000u32;
        let f = 640.0;
        let x: Vec<f64> = (0..2048)
            .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / fs as f64).sin())
            .collect();
        let y = decimate_by_2(&x);
        let sx = AmplitudeSpectrum::from_signal(&x, fs, 4096).unwrap();
        let sy = AmplitudeSpectrum::from_signal(&y, 8000, 4096).unwrap();
        let peak = |s: &AmplitudeSpectrum| {
            s.amplitudes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        let fx = sx.freq_at(peak(&sx));
        let fy = sy.freq_at(peak(&sy));
        assert!((fx - fy).abs() <= sx.bin_hz());
    }
}
