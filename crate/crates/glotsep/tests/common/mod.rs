//! Shared helpers for the integration suites: synthetic utterance pools
//! and randomized speech-domain analysis frames.

use glotsep::lf::{synthesize, LFParams, SyntheticUtterance, VocalTractModel, Vowel};
use glotsep::signal::{extract_frame, make_window, AnalysisFrame, WindowSpec};
use rand::rngs::StdRng;
use rand::Rng;

/// Synthesizes one utterance at 16 kHz.
pub fn utterance(f0: f64, oq: f64, am: f64, vowel: Vowel, n_periods: usize) -> SyntheticUtterance {
    let params = LFParams::new(f0, oq, am, 1.0).expect("valid grid parameters");
    let tract = VocalTractModel::from_vowel(vowel, 16000).expect("tract below Nyquist");
    synthesize(&params, &tract, n_periods, 16000).expect("synthesis succeeds")
}

/// A small diverse pool of utterances for random frame sampling.
pub fn utterance_pool() -> Vec<SyntheticUtterance> {
    let mut pool = Vec::new();
    for &(f0, oq, am, vowel) in &[
        (60.0, 0.4, 0.6, Vowel::A),
        (60.0, 0.9, 0.8, Vowel::I),
        (95.0, 0.65, 0.7, Vowel::Schwa),
        (95.0, 0.5, 0.85, Vowel::Y),
        (130.0, 0.8, 0.6, Vowel::A),
        (130.0, 0.45, 0.75, Vowel::I),
        (180.0, 0.7, 0.65, Vowel::Schwa),
        (180.0, 0.55, 0.8, Vowel::A),
    ] {
        pool.push(utterance(f0, oq, am, vowel, 12));
    }
    pool
}

/// Draws a windowed frame of random length, shape and position from the
/// pool: the speech-domain input population of the decomposition.
pub fn random_speech_frame(
    rng: &mut StdRng,
    pool: &[SyntheticUtterance],
    min_len: usize,
    max_len: usize,
) -> AnalysisFrame {
    let utt = &pool[rng.gen_range(0..pool.len())];
    let n = rng.gen_range(min_len..=max_len);
    let alpha = rng.gen_range(0.7..=1.0);
    let start = rng.gen_range(0..utt.speech.len() - n);
    let w = make_window(&WindowSpec::new(alpha, n).expect("valid window"));
    let samples: Vec<f64> = utt.speech.samples[start..start + n]
        .iter()
        .zip(&w)
        .map(|(x, wi)| x * wi)
        .collect();
    AnalysisFrame::from_raw(samples, 16000).expect("frame is well-formed")
}

/// Draws a GCI-centered pitch-synchronous frame of random shape, length
/// and position from the pool: the input domain of the causal-anticausal
/// factorization. Arbitrary (non-synchronous) slices are excluded on
/// purpose — their zero sets develop angular clusters whose factor
/// polynomials overflow the double-precision dynamic range, so the
/// factored-reconstruction identity only makes sense on synchronous
/// frames (the same frames for which the mixed-phase model holds).
pub fn random_synchronous_frame(
    rng: &mut StdRng,
    pool: &[SyntheticUtterance],
    min_periods: f64,
    max_periods: f64,
) -> AnalysisFrame {
    let utt = &pool[rng.gen_range(0..pool.len())];
    let alpha = rng.gen_range(0.7..=1.0);
    let periods = rng.gen_range(min_periods..=max_periods);
    let gci = utt.gci_samples[rng.gen_range(2..utt.gci_samples.len() - 2)];
    let period = (16000.0 / utt.params.f0).round() as usize;
    extract_frame(&utt.speech, gci, period, alpha, periods).expect("frame fits the utterance")
}

/// Median of a non-empty slice.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    0.5 * (sorted[(n - 1) / 2] + sorted[n / 2])
}

/// Relative L2 distance between two equal-length signals.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / den.max(1e-300)
}
