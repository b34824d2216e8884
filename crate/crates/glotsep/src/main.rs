//! Command-line surface: synthesis, decomposition, the sweep and timing
//! studies, and corpus analysis.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use glotsep::harness::{self, CorpusConfig, CorpusInput, FrameOutcome, FrameRecord};
use glotsep::io::{self, GciUnit};
use glotsep::lf::{synthesize, LFParams, VocalTractModel, Vowel};
use glotsep::signal::{SampleBuffer, WindowSpec};
use glotsep::{Backend, Error, Result};

#[derive(Parser)]
#[command(
    name = "glotsep",
    version,
    about = "Glottal source estimation by causal-anticausal decomposition of voiced speech"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a vowel utterance with known glottal ground truth
    Synth(SynthArgs),
    /// Decompose a recording at its GCIs into glottal waveforms and features
    Decompose(DecomposeArgs),
    /// Run a windowing or GCI-offset study over the synthetic grid
    Sweep(SweepArgs),
    /// Time both backends per frame at 60 and 180 Hz
    Bench(BenchArgs),
    /// Batch feature analysis over a corpus of recordings
    Analyze(AnalyzeArgs),
}

/// Decomposition settings shared by `decompose` and `analyze`.
#[derive(Args)]
struct DecompOpts {
    /// Decomposition backend: zzt or cc
    #[arg(long, default_value = "cc")]
    backend: String,
    /// Window shape parameter in [0.7, 1] (1 = Hanning-like)
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Window length in pitch periods
    #[arg(long, default_value_t = 2.0)]
    periods: f64,
    /// FFT size of the cepstral backend (power of two, >= 4x frame length)
    #[arg(long, default_value_t = 4096)]
    nfft: usize,
    /// Spectral center-of-gravity validity threshold in Hz
    #[arg(long = "cog-threshold", default_value_t = 2750.0)]
    cog_threshold: f64,
}

impl DecompOpts {
    fn resolve(&self) -> Result<(Backend, CorpusConfig)> {
        let backend = Backend::from_label(&self.backend)?;
        WindowSpec::new(self.alpha, 64)?;
        if !(self.periods > 0.0) {
            return Err(Error::param("periods", "must be positive"));
        }
        if !self.nfft.is_power_of_two() {
            return Err(Error::param("nfft", "must be a power of two"));
        }
        if !(self.cog_threshold > 0.0) {
            return Err(Error::param("cog-threshold", "must be positive"));
        }
        let config = CorpusConfig {
            backend,
            alpha: self.alpha,
            periods: self.periods,
            n_fft: self.nfft,
            cog_threshold_hz: self.cog_threshold,
            ..CorpusConfig::default()
        };
        Ok((backend, config))
    }
}

/// GCI-annotation settings shared by `decompose` and `analyze`.
#[derive(Args)]
struct GciOpts {
    /// GCI column unit: auto (seconds if fractional), seconds, samples
    #[arg(long = "gci-unit", default_value = "auto")]
    gci_unit: String,
    /// Delay compensation applied to the GCIs, in milliseconds
    #[arg(long = "gci-shift-ms", default_value_t = 0.0)]
    gci_shift_ms: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Fundamental frequency in Hz
    #[arg(long, default_value_t = 100.0)]
    f0: f64,
    /// Open quotient in [0.3, 0.9]
    #[arg(long, default_value_t = 0.6)]
    oq: f64,
    /// Asymmetry coefficient in [0.55, 0.85]
    #[arg(long, default_value_t = 0.7)]
    am: f64,
    /// Closure-peak magnitude of the flow derivative
    #[arg(long, default_value_t = 1.0)]
    ee: f64,
    /// Vowel tract: a, @, i or y
    #[arg(long, default_value = "a")]
    vowel: String,
    /// Number of glottal cycles
    #[arg(long = "n-periods", default_value_t = 8)]
    n_periods: usize,
    /// Sample rate in Hz
    #[arg(long = "sample-rate", default_value_t = 16000)]
    sample_rate: u32,
    /// Output stem; writes <stem>.wav, <stem>.gci and <stem>.truth.wav
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input mono WAV (16-bit PCM or 32-bit float)
    wav: PathBuf,
    /// GCI annotation file, one instant per line
    #[arg(long)]
    gci: PathBuf,
    /// Optional pitch file: time and f0 per line (f0 = 0 marks unvoiced)
    #[arg(long)]
    pitch: Option<PathBuf>,
    #[command(flatten)]
    gci_opts: GciOpts,
    #[command(flatten)]
    opts: DecompOpts,
    /// Feature CSV path (default: <input>.features.csv)
    #[arg(long = "out-features")]
    out_features: Option<PathBuf>,
    /// Per-frame waveform JSON path (default: <input>.waveforms.json)
    #[arg(long = "out-waveforms")]
    out_waveforms: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Which study to run: window (length x alpha) or offset (GCI shift)
    #[arg(long)]
    figure: String,
    /// Decomposition backend: zzt or cc
    #[arg(long, default_value = "cc")]
    backend: String,
    /// FFT size of the cepstral backend (power of two)
    #[arg(long, default_value_t = 4096)]
    nfft: usize,
    /// Evaluate only the first N grid conditions (full grid: 539)
    #[arg(long = "grid-limit")]
    grid_limit: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Timed repetitions per cell (floor: 30)
    #[arg(long, default_value_t = 30)]
    repetitions: usize,
    /// Optional CSV path for the raw rows
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input WAV files; each expects sidecar <stem>.gci and optional <stem>.f0
    #[arg(required = true)]
    wavs: Vec<PathBuf>,
    /// Explicit GCI file (single input only; overrides the sidecar)
    #[arg(long)]
    gci: Option<PathBuf>,
    /// Explicit pitch file (single input only; overrides the sidecar)
    #[arg(long)]
    pitch: Option<PathBuf>,
    #[command(flatten)]
    gci_opts: GciOpts,
    #[command(flatten)]
    opts: DecompOpts,
    /// Feature CSV path for all frames of the corpus
    #[arg(long = "out-features")]
    out_features: Option<PathBuf>,
    /// Summary report JSON path (counts, histograms, file errors)
    #[arg(long = "out-report")]
    out_report: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Bench(args) => run_bench(args),
        Command::Analyze(args) => run_analyze(args),
    }
}

fn stem_path(stem: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", stem.display()))
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let params = LFParams::new(args.f0, args.oq, args.am, args.ee)?;
    let vowel = Vowel::from_label(&args.vowel)?;
    let tract = VocalTractModel::from_vowel(vowel, args.sample_rate)?;
    let utt = synthesize(&params, &tract, args.n_periods, args.sample_rate)?;

    // Scale speech and truth together so the speech peaks at 0.98 and
    // 16-bit quantization stays within one LSB on re-read.
    let peak = utt
        .speech
        .samples
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    let scale = if peak > 0.0 { 0.98 / peak } else { 1.0 };
    let rescale = |buffer: &SampleBuffer| SampleBuffer {
        samples: buffer.samples.iter().map(|&x| scale * x).collect(),
        sample_rate: buffer.sample_rate,
    };

    let wav_path = stem_path(&args.out, ".wav");
    let gci_path = stem_path(&args.out, ".gci");
    let truth_path = stem_path(&args.out, ".truth.wav");
    io::write_wav_pcm16(&wav_path, &rescale(&utt.speech))?;
    io::write_gci_samples(&gci_path, &utt.gci_samples)?;
    io::write_wav_float32(&truth_path, &rescale(&utt.glottal_derivative_truth))?;
    println!(
        "wrote {} ({} samples at {} Hz), {} ({} instants), {}",
        wav_path.display(),
        utt.speech.len(),
        args.sample_rate,
        gci_path.display(),
        utt.gci_samples.len(),
        truth_path.display(),
    );
    Ok(())
}

/// Loads one recording with its annotations into a corpus input.
fn load_input(
    wav: &Path,
    gci: &Path,
    pitch: Option<&Path>,
    gci_opts: &GciOpts,
) -> Result<CorpusInput> {
    let unit = GciUnit::from_label(&gci_opts.gci_unit)?;
    let speech = io::read_wav(wav)?;
    let annotation = io::read_gci(gci, unit)?;
    let raw = annotation.to_samples(speech.sample_rate, speech.len())?;
    let shift = (gci_opts.gci_shift_ms * speech.sample_rate as f64 / 1000.0).round() as i64;
    let (gci_samples, dropped) = io::shift_gcis(&raw, shift, speech.len());
    if dropped > 0 {
        eprintln!(
            "note: {dropped} GCIs fell outside {} after the {} ms shift and were dropped",
            wav.display(),
            gci_opts.gci_shift_ms
        );
    }
    let track = pitch.map(io::read_pitch).transpose()?;
    let f0_hz = match &track {
        Some(t) => gci_samples
            .iter()
            .map(|&g| t.f0_at(g as f64 / speech.sample_rate as f64))
            .collect(),
        None => Vec::new(),
    };
    let name = wav
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| wav.display().to_string());
    Ok(CorpusInput {
        name,
        speech,
        gci_samples,
        f0_hz,
    })
}

fn count_outcomes(records: &[FrameRecord]) -> (usize, usize, usize, usize) {
    let (mut analyzed, mut unvoiced, mut edge, mut failed) = (0, 0, 0, 0);
    for r in records {
        match r.outcome {
            FrameOutcome::Analyzed(_) => analyzed += 1,
            FrameOutcome::SkippedUnvoiced => unvoiced += 1,
            FrameOutcome::SkippedEdge => edge += 1,
            FrameOutcome::Failed(_) => failed += 1,
        }
    }
    (analyzed, unvoiced, edge, failed)
}

fn run_decompose(args: DecomposeArgs) -> Result<()> {
    let (_, config) = args.opts.resolve()?;
    let input = load_input(&args.wav, &args.gci, args.pitch.as_deref(), &args.gci_opts)?;
    let frames = harness::decompose_file(&input, &config);
    let records: Vec<FrameRecord> = frames.iter().map(|(r, _)| r.clone()).collect();

    let out_features = args
        .out_features
        .unwrap_or_else(|| args.wav.with_extension("features.csv"));
    let out_waveforms = args
        .out_waveforms
        .unwrap_or_else(|| args.wav.with_extension("waveforms.json"));
    io::write_features_csv(&out_features, &records)?;
    io::write_waveforms_json(
        &out_waveforms,
        &input.name,
        input.speech.sample_rate,
        &frames,
    )?;

    let (analyzed, unvoiced, edge, failed) = count_outcomes(&records);
    println!(
        "{}: {} frames — {analyzed} analyzed, {unvoiced} unvoiced, {edge} edge-skipped, {failed} failed",
        input.name,
        records.len(),
    );
    println!(
        "wrote {} and {}",
        out_features.display(),
        out_waveforms.display()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let backend = Backend::from_label(&args.backend)?;
    if !args.nfft.is_power_of_two() {
        return Err(Error::param("nfft", "must be a power of two"));
    }
    let mut grid = harness::decimated_grid();
    if let Some(limit) = args.grid_limit {
        if limit == 0 {
            return Err(Error::param("grid-limit", "must be positive"));
        }
        grid.truncate(limit);
    }
    let result = match args.figure.as_str() {
        "window" => {
            let lengths: Vec<f64> = (0..9).map(|i| 1.0 + 0.25 * i as f64).collect();
            let alphas = [0.7, 0.8, 0.84, 0.9, 1.0];
            harness::sweep_window(&grid, &lengths, &alphas, backend, args.nfft)?
        }
        "offset" => {
            // +/-1 ms at the 8 kHz grid rate, in 0.25 ms steps.
            let offsets: Vec<i64> = (-4..=4).map(|i| 2 * i).collect();
            harness::sweep_gci_offset(&grid, &offsets, backend, args.nfft)?
        }
        other => {
            return Err(Error::param(
                "figure",
                format!("unknown study {other:?}, expected window or offset"),
            ));
        }
    };
    io::write_sweep_csv(&args.out, &result)?;
    println!(
        "{} study, {} backend: {} cells over {} grid conditions",
        args.figure,
        backend.label(),
        result.cells.len(),
        grid.len()
    );
    match args.figure.as_str() {
        "window" => {
            if let Some(best) = result.cells.iter().max_by(|a, b| {
                a.determination_rate
                    .partial_cmp(&b.determination_rate)
                    .unwrap()
            }) {
                println!(
                    "best determination rate {:.3} at alpha = {}, length = {} T0",
                    best.determination_rate, best.alpha, best.length_t0
                );
            }
        }
        _ => {
            if let Some(best) = result
                .cells
                .iter()
                .filter(|c| c.mean_sd_db.is_finite())
                .min_by(|a, b| a.mean_sd_db.partial_cmp(&b.mean_sd_db).unwrap())
            {
                println!(
                    "lowest mean SD {:.3} dB at offset {} samples",
                    best.mean_sd_db, best.offset_samples
                );
            }
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let results = harness::benchmark(args.repetitions)?;
    print!("{}", io::benchmark_table(&results));
    println!();
    println!("median seconds per frame:");
    for r in &results {
        println!(
            "  {} Hz {}: {:.6} s (frame length {})",
            r.pitch_hz,
            r.backend.label(),
            r.median_seconds,
            r.frame_length
        );
    }
    if let Some(out) = args.out {
        io::write_benchmark_csv(&out, &results)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let (backend, config) = args.opts.resolve()?;
    if (args.gci.is_some() || args.pitch.is_some()) && args.wavs.len() > 1 {
        return Err(Error::param(
            "gci",
            "explicit --gci/--pitch apply to a single input; use sidecar files for a corpus",
        ));
    }
    let mut inputs = Vec::new();
    let mut file_errors: Vec<(String, String)> = Vec::new();
    for wav in &args.wavs {
        let gci = args
            .gci
            .clone()
            .unwrap_or_else(|| wav.with_extension("gci"));
        let pitch = args.pitch.clone().or_else(|| {
            let sidecar = wav.with_extension("f0");
            sidecar.exists().then_some(sidecar)
        });
        match load_input(wav, &gci, pitch.as_deref(), &args.gci_opts) {
            Ok(input) => inputs.push(input),
            Err(e) => {
                let name = wav.display().to_string();
                eprintln!("error in {name}: {e}");
                file_errors.push((name, e.to_string()));
            }
        }
    }
    if inputs.is_empty() {
        return Err(Error::Format {
            path: args.wavs[0].display().to_string(),
            reason: format!("no readable inputs ({} files failed)", file_errors.len()),
        });
    }

    let report = harness::corpus_analysis(&inputs, &config);
    println!(
        "files: {} analyzed, {} failed to load",
        inputs.len(),
        file_errors.len()
    );
    println!(
        "frames: {} analyzed, {} unvoiced, {} edge-skipped, {} failed",
        report.n_analyzed, report.n_skipped_unvoiced, report.n_skipped_edge, report.n_failed
    );
    println!("valid fraction: {:.3}", report.valid_fraction);
    for h in &report.histograms {
        println!(
            "{}: n = {}, robust range [{:.4}, {:.4}]",
            h.feature, h.n, h.lo, h.hi
        );
    }
    if let Some(out) = args.out_features {
        io::write_features_csv(&out, &report.records)?;
        println!("wrote {}", out.display());
    }
    if let Some(out) = args.out_report {
        io::write_report_json(&out, &report, backend, &file_errors)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
