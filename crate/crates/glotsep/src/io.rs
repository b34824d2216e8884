//! File ingestion (WAV audio, GCI and pitch annotations) and result
//! serialization (CSV, JSON, WAV).
//!
//! All writers are deterministic byte-for-byte given identical inputs;
//! every CSV carries a versioned schema tag and always emits its header
//! row, even with zero data rows.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{
    BenchmarkResult, CorpusReport, FrameOutcome, FrameRecord, Histogram, SweepResult,
};
use crate::signal::SampleBuffer;

/// Schema tag of the per-frame feature CSV.
pub const FEATURES_SCHEMA: &str = "features-v1";
/// Schema tag of the sweep-result CSV.
pub const SWEEP_SCHEMA: &str = "sweep-v1";
/// Schema tag of the benchmark CSV.
pub const BENCH_SCHEMA: &str = "bench-v1";
/// Schema tag of the per-frame waveform JSON.
pub const WAVEFORMS_SCHEMA: &str = "waveforms-v1";
/// Schema tag of the corpus-report JSON.
pub const REPORT_SCHEMA: &str = "report-v1";

// ---------------------------------------------------------------------------
// WAV
// ---------------------------------------------------------------------------

/// Reads a mono RIFF/WAVE file, 16-bit PCM (normalized by 1/32768) or
/// 32-bit IEEE float.
pub fn read_wav(path: &Path) -> Result<SampleBuffer> {
    let shown = path.display().to_string();
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Format {
            path: shown,
            reason: format!("fmt chunk declares {} channels, expected mono", spec.channels),
        });
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        (format, bits) => {
            return Err(Error::Format {
                path: shown,
                reason: format!(
                    "fmt chunk declares {bits}-bit {format:?} samples, \
                     expected 16-bit PCM or 32-bit float"
                ),
            });
        }
    };
    Ok(SampleBuffer {
        samples,
        sample_rate: spec.sample_rate,
    })
}

/// Writes 16-bit PCM; values are quantized by 32768 and clamped to the
/// i16 range, so inputs in [−1, 1) round-trip within one LSB.
pub fn write_wav_pcm16(path: &Path, buffer: &SampleBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &x in &buffer.samples {
        let q = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q)?;
    }
    writer.finalize()?;
    Ok(())
}

/// Writes 32-bit float samples (lossless up to the f32 cast).
pub fn write_wav_float32(path: &Path, buffer: &SampleBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &x in &buffer.samples {
        writer.write_sample(x as f32)?;
    }
    writer.finalize()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// GCI annotations
// ---------------------------------------------------------------------------

/// How the single column of a GCI file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GciUnit {
    /// Seconds if any entry is fractional, sample indices otherwise.
    Auto,
    Seconds,
    Samples,
}

impl GciUnit {
    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(GciUnit::Auto),
            "seconds" => Ok(GciUnit::Seconds),
            "samples" => Ok(GciUnit::Samples),
            other => Err(Error::param(
                "gci-unit",
                format!("unknown unit {other:?}, expected auto, seconds or samples"),
            )),
        }
    }
}

/// Parsed GCI instants with their source line numbers (for later
/// range diagnostics) and the unit they resolved to.
#[derive(Debug, Clone)]
pub struct GciAnnotation {
    values: Vec<f64>,
    lines: Vec<usize>,
    /// Resolved unit: `Seconds` or `Samples`, never `Auto`.
    unit: GciUnit,
    path: String,
}

impl GciAnnotation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn unit(&self) -> GciUnit {
        self.unit
    }

    /// Converts the instants to sample indices of a signal, enforcing
    /// that every instant falls inside its duration.
    pub fn to_samples(&self, sample_rate: u32, signal_len: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.values.len());
        for (&v, &line) in self.values.iter().zip(&self.lines) {
            let sample = match self.unit {
                GciUnit::Seconds => (v * sample_rate as f64).round() as i64,
                _ => v.round() as i64,
            };
            if sample < 0 || sample as usize >= signal_len {
                return Err(Error::Parse {
                    path: self.path.clone(),
                    line,
                    reason: format!(
                        "GCI {v} maps to sample {sample}, outside the audio ({signal_len} samples)"
                    ),
                });
            }
            out.push(sample as usize);
        }
        Ok(out)
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Reads a single-column GCI file. With `GciUnit::Auto` the unit is
/// detected from the data: seconds if any entry has a fractional part,
/// sample indices otherwise.
pub fn read_gci(path: &Path, unit: GciUnit) -> Result<GciAnnotation> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    parse_gci(&text, &shown, unit)
}

fn parse_gci(text: &str, path: &str, unit: GciUnit) -> Result<GciAnnotation> {
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (line, content) in data_lines(text) {
        let mut fields = content.split_whitespace();
        let token = fields.next().expect("data lines are non-empty");
        if fields.next().is_some() {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                reason: "expected a single column".into(),
            });
        }
        let v: f64 = token.parse().map_err(|_| Error::Parse {
            path: path.to_string(),
            line,
            reason: format!("not a number: {token:?}"),
        })?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                reason: format!("GCI must be finite and non-negative, got {v}"),
            });
        }
        if let Some(&prev) = values.last() {
            if v <= prev {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line,
                    reason: format!("non-monotone GCI: {v} after {prev}"),
                });
            }
        }
        values.push(v);
        lines.push(line);
    }
    let resolved = match unit {
        GciUnit::Auto => {
            if values.iter().any(|v| v.fract() != 0.0) {
                GciUnit::Seconds
            } else {
                GciUnit::Samples
            }
        }
        explicit => explicit,
    };
    Ok(GciAnnotation {
        values,
        lines,
        unit: resolved,
        path: path.to_string(),
    })
}

/// Writes GCI sample indices, one integer per line.
pub fn write_gci_samples(path: &Path, gci_samples: &[usize]) -> Result<()> {
    let mut out = String::new();
    for &g in gci_samples {
        writeln!(out, "{g}").expect("string writes are infallible");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Applies a delay-compensation shift to GCI sample indices; entries
/// pushed outside the signal are dropped. Returns the surviving indices
/// and the dropped count.
pub fn shift_gcis(gci_samples: &[usize], shift_samples: i64, signal_len: usize) -> (Vec<usize>, usize) {
    let mut kept = Vec::with_capacity(gci_samples.len());
    let mut dropped = 0usize;
    for &g in gci_samples {
        let shifted = g as i64 + shift_samples;
        if shifted >= 0 && (shifted as usize) < signal_len {
            kept.push(shifted as usize);
        } else {
            dropped += 1;
        }
    }
    (kept, dropped)
}

// ---------------------------------------------------------------------------
// Pitch tracks
// ---------------------------------------------------------------------------

/// A two-column pitch contour: frame time (seconds) and f0 (Hz,
/// 0 = unvoiced).
#[derive(Debug, Clone)]
pub struct PitchTrack {
    pub times: Vec<f64>,
    pub f0: Vec<f64>,
}

impl PitchTrack {
    /// f0 of the pitch frame nearest in time; `None` on an empty track.
    pub fn f0_at(&self, t_seconds: f64) -> Option<f64> {
        if self.times.is_empty() {
            return None;
        }
        let i = self.times.partition_point(|&t| t < t_seconds);
        let best = if i == 0 {
            0
        } else if i == self.times.len() {
            i - 1
        } else if (self.times[i] - t_seconds).abs() < (t_seconds - self.times[i - 1]).abs() {
            i
        } else {
            i - 1
        };
        Some(self.f0[best])
    }
}

/// Reads a two-column `time f0` pitch file; times must be strictly
/// increasing and f0 non-negative.
pub fn read_pitch(path: &Path) -> Result<PitchTrack> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    parse_pitch(&text, &shown)
}

fn parse_pitch(text: &str, path: &str) -> Result<PitchTrack> {
    let mut times = Vec::new();
    let mut f0 = Vec::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                reason: format!("expected two columns (time f0), got {}", fields.len()),
            });
        }
        let parse = |token: &str, what: &str| -> Result<f64> {
            token.parse().map_err(|_| Error::Parse {
                path: path.to_string(),
                line,
                reason: format!("{what} is not a number: {token:?}"),
            })
        };
        let t = parse(fields[0], "time")?;
        let f = parse(fields[1], "f0")?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                reason: format!("time must be finite and non-negative, got {t}"),
            });
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line,
                    reason: format!("non-monotone time: {t} after {prev}"),
                });
            }
        }
        if !f.is_finite() || f < 0.0 {
            return Err(Error::Parse {
                path: path.to_string(),
                line,
                reason: format!("f0 must be finite and non-negative, got {f}"),
            });
        }
        times.push(t);
        f0.push(f);
    }
    Ok(PitchTrack { times, f0 })
}

// ---------------------------------------------------------------------------
// CSV / JSON writers
// ---------------------------------------------------------------------------

/// RFC 4180 quoting: fields containing separators or quotes are wrapped
/// and inner quotes doubled.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn outcome_status(outcome: &FrameOutcome) -> (&'static str, String) {
    match outcome {
        FrameOutcome::Analyzed(_) => ("analyzed", String::new()),
        FrameOutcome::SkippedUnvoiced => ("skipped_unvoiced", String::new()),
        FrameOutcome::SkippedEdge => ("skipped_edge", String::new()),
        FrameOutcome::Failed(reason) => ("failed", reason.clone()),
    }
}

/// Renders per-frame feature records as CSV: one row per GCI, whatever
/// the frame's outcome.
pub fn features_csv(records: &[FrameRecord]) -> String {
    let mut out = String::from(
        "schema,file,gci_sample,status,detail,fg_hz,bw_hz,naq,h1h2_db,hrf_db,cog_hz,valid\n",
    );
    for r in records {
        let (status, detail) = outcome_status(&r.outcome);
        let (fg, bw, naq, h1h2, hrf, cog, valid) = match &r.outcome {
            FrameOutcome::Analyzed(f) => (
                opt(f.fg_hz),
                opt(f.bw_hz),
                opt(f.naq),
                opt(f.h1h2_db),
                opt(f.hrf_db),
                f.cog_hz.to_string(),
                f.valid.to_string(),
            ),
            _ => Default::default(),
        };
        writeln!(
            out,
            "{FEATURES_SCHEMA},{},{},{status},{},{fg},{bw},{naq},{h1h2},{hrf},{cog},{valid}",
            csv_escape(&r.file),
            r.gci_sample,
            csv_escape(&detail),
        )
        .expect("string writes are infallible");
    }
    out
}

pub fn write_features_csv(path: &Path, records: &[FrameRecord]) -> Result<()> {
    std::fs::write(path, features_csv(records))?;
    Ok(())
}

/// Renders a sweep result as CSV, one row per cell.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "schema,backend,length_t0,alpha,offset_samples,determination_rate,mean_sd_db,n_frames\n",
    );
    for c in &result.cells {
        writeln!(
            out,
            "{SWEEP_SCHEMA},{},{},{},{},{},{},{}",
            result.backend.label(),
            c.length_t0,
            c.alpha,
            c.offset_samples,
            c.determination_rate,
            c.mean_sd_db,
            c.n_frames,
        )
        .expect("string writes are infallible");
    }
    out
}

pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    std::fs::write(path, sweep_csv(result))?;
    Ok(())
}

/// Renders benchmark rows as CSV.
pub fn benchmark_csv(results: &[BenchmarkResult]) -> String {
    let mut out =
        String::from("schema,pitch_hz,backend,frame_length,median_seconds,normalized\n");
    for r in results {
        writeln!(
            out,
            "{BENCH_SCHEMA},{},{},{},{},{}",
            r.pitch_hz,
            r.backend.label(),
            r.frame_length,
            r.median_seconds,
            r.normalized,
        )
        .expect("string writes are infallible");
    }
    out
}

pub fn write_benchmark_csv(path: &Path, results: &[BenchmarkResult]) -> Result<()> {
    std::fs::write(path, benchmark_csv(results))?;
    Ok(())
}

/// Renders the normalized timing table, cells relative to the cepstral
/// backend at 180 Hz.
pub fn benchmark_table(results: &[BenchmarkResult]) -> String {
    let cell = |pitch: f64, backend: crate::Backend| -> String {
        results
            .iter()
            .find(|r| r.pitch_hz == pitch && r.backend == backend)
            .map(|r| format!("{:.2}", r.normalized))
            .unwrap_or_else(|| "-".into())
    };
    let mut out = String::from("Pitch | ZZT-based | CC-based\n");
    for &pitch in &[60.0, 180.0] {
        writeln!(
            out,
            "{} Hz | {} | {}",
            pitch,
            cell(pitch, crate::Backend::Zzt),
            cell(pitch, crate::Backend::Cc),
        )
        .expect("string writes are infallible");
    }
    out
}

#[derive(Serialize)]
struct WaveformFrame<'a> {
    gci_sample: usize,
    status: &'static str,
    detail: String,
    samples: &'a [f64],
}

#[derive(Serialize)]
struct WaveformsDoc<'a> {
    schema: &'static str,
    file: &'a str,
    sample_rate: u32,
    frames: Vec<WaveformFrame<'a>>,
}

/// Renders per-frame anticausal waveforms as JSON (origin sample last;
/// frames without an estimate carry an empty sample list).
pub fn waveforms_json(
    file: &str,
    sample_rate: u32,
    frames: &[(FrameRecord, Option<Vec<f64>>)],
) -> String {
    let doc = WaveformsDoc {
        schema: WAVEFORMS_SCHEMA,
        file,
        sample_rate,
        frames: frames
            .iter()
            .map(|(record, samples)| {
                let (status, detail) = outcome_status(&record.outcome);
                WaveformFrame {
                    gci_sample: record.gci_sample,
                    status,
                    detail,
                    samples: samples.as_deref().unwrap_or(&[]),
                }
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain structs serialize");
    text.push('\n');
    text
}

pub fn write_waveforms_json(
    path: &Path,
    file: &str,
    sample_rate: u32,
    frames: &[(FrameRecord, Option<Vec<f64>>)],
) -> Result<()> {
    std::fs::write(path, waveforms_json(file, sample_rate, frames))?;
    Ok(())
}

#[derive(Serialize)]
struct HistogramJson<'a> {
    feature: &'a str,
    lo: f64,
    hi: f64,
    n: usize,
    counts: &'a [usize],
}

#[derive(Serialize)]
struct FileErrorJson<'a> {
    file: &'a str,
    error: &'a str,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema: &'static str,
    backend: &'a str,
    n_analyzed: usize,
    n_skipped_unvoiced: usize,
    n_skipped_edge: usize,
    n_failed: usize,
    valid_fraction: f64,
    file_errors: Vec<FileErrorJson<'a>>,
    histograms: Vec<HistogramJson<'a>>,
}

fn histogram_json(h: &Histogram) -> HistogramJson<'_> {
    HistogramJson {
        feature: &h.feature,
        lo: h.lo,
        hi: h.hi,
        n: h.n,
        counts: &h.counts,
    }
}

/// Renders a corpus report (summary counts, per-file read errors,
/// feature histograms) as JSON.
pub fn report_json(
    report: &CorpusReport,
    backend: crate::Backend,
    file_errors: &[(String, String)],
) -> String {
    let doc = ReportDoc {
        schema: REPORT_SCHEMA,
        backend: backend.label(),
        n_analyzed: report.n_analyzed,
        n_skipped_unvoiced: report.n_skipped_unvoiced,
        n_skipped_edge: report.n_skipped_edge,
        n_failed: report.n_failed,
        valid_fraction: report.valid_fraction,
        file_errors: file_errors
            .iter()
            .map(|(file, error)| FileErrorJson { file, error })
            .collect(),
        histograms: report.histograms.iter().map(histogram_json).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain structs serialize");
    text.push('\n');
    text
}

pub fn write_report_json(
    path: &Path,
    report: &CorpusReport,
    backend: crate::Backend,
    file_errors: &[(String, String)],
) -> Result<()> {
    std::fs::write(path, report_json(report, backend, file_errors))?;
    Ok(())
}
