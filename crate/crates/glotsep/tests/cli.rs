//! End-to-end CLI checks over the compiled binary: synth → decompose →
//! analyze round trips, sweep output schema, and exit-code mapping.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_glotsep")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path_str(p: &Path) -> String {
    p.to_str().expect("utf-8 path").to_string()
}

#[test]
fn synth_decompose_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("vowel");

    // Synthesize a known utterance.
    let out = run(&[
        "synth",
        "--f0",
        "100",
        "--oq",
        "0.6",
        "--am",
        "0.7",
        "--vowel",
        "a",
        "--n-periods",
        "8",
        "--out",
        &path_str(&stem),
    ]);
    assert!(out.status.success(), "synth failed: {}", stderr(&out));
    let wav = dir.path().join("vowel.wav");
    let gci = dir.path().join("vowel.gci");
    let truth = dir.path().join("vowel.truth.wav");
    assert!(wav.exists() && gci.exists() && truth.exists());
    // GCI ground truth serializes as integer sample indices.
    let gci_text = std::fs::read_to_string(&gci).unwrap();
    let instants: Vec<usize> = gci_text
        .lines()
        .map(|l| l.parse().expect("integer GCI"))
        .collect();
    assert_eq!(instants.len(), 8);
    assert!(instants.windows(2).all(|w| w[1] > w[0]));

    // Decompose with defaults: one CSV row per GCI, plus waveforms.
    let out = run(&["decompose", &path_str(&wav), "--gci", &path_str(&gci)]);
    assert!(out.status.success(), "decompose failed: {}", stderr(&out));
    let features = dir.path().join("vowel.features.csv");
    let waveforms = dir.path().join("vowel.waveforms.json");
    let csv = std::fs::read_to_string(&features).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("schema,file,gci_sample,status"));
    assert_eq!(lines.len(), 1 + 8, "one row per GCI:\n{csv}");
    assert!(csv.contains("analyzed"), "no analyzed frames:\n{csv}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&waveforms).unwrap()).unwrap();
    assert_eq!(doc["schema"], "waveforms-v1");
    assert_eq!(doc["frames"].as_array().unwrap().len(), 8);

    // With a pitch track, pitch-dependent features appear; unvoiced
    // frames are skipped.
    let pitch = dir.path().join("vowel.f0");
    std::fs::write(&pitch, "0.000 100\n0.050 100\n0.090 0\n").unwrap();
    let out = run(&[
        "decompose",
        &path_str(&wav),
        "--gci",
        &path_str(&gci),
        "--pitch",
        &path_str(&pitch),
        "--backend",
        "zzt",
    ]);
    assert!(out.status.success(), "decompose failed: {}", stderr(&out));
    let csv = std::fs::read_to_string(&features).unwrap();
    assert!(csv.contains("skipped_unvoiced"), "{csv}");

    // analyze picks up the sidecar annotations (vowel.gci, vowel.f0).
    let report = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        &path_str(&wav),
        "--out-report",
        &path_str(&report),
    ]);
    assert!(out.status.success(), "analyze failed: {}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["schema"], "report-v1");
    assert!(doc["n_analyzed"].as_u64().unwrap() >= 4);
    assert_eq!(doc["histograms"].as_array().unwrap().len(), 4);
    let text = stdout(&out);
    assert!(text.contains("valid fraction"), "{text}");
}

#[test]
fn analyze_continues_past_unreadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("ok");
    let out = run(&["synth", "--out", &path_str(&stem)]);
    assert!(out.status.success(), "synth failed: {}", stderr(&out));
    let good = dir.path().join("ok.wav");
    let missing = dir.path().join("missing.wav");

    let out = run(&[
        "analyze",
        &path_str(&good),
        &path_str(&missing),
    ]);
    assert!(
        out.status.success(),
        "corpus run aborted on a bad file: {}",
        stderr(&out)
    );
    assert!(stderr(&out).contains("missing.wav"), "{}", stderr(&out));
    assert!(stdout(&out).contains("1 failed to load"), "{}", stdout(&out));

    // When nothing is readable the run is an input-format failure.
    let out = run(&["analyze", &path_str(&missing)]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn sweep_writes_the_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("offset.csv");
    let out = run(&[
        "sweep",
        "--figure",
        "offset",
        "--grid-limit",
        "2",
        "--out",
        &path_str(&out_csv),
    ]);
    assert!(out.status.success(), "sweep failed: {}", stderr(&out));
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "schema,backend,length_t0,alpha,offset_samples,determination_rate,mean_sd_db,n_frames"
    );
    assert_eq!(lines.len(), 1 + 9, "nine offset cells:\n{csv}");
    assert!(lines[1].starts_with("sweep-v1,cc,2,1,-8,"), "{csv}");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage problems exit 1.
    let out = run(&["decompose", "nonexistent.wav", "--gci", "x.gci", "--backend", "bogus"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let out = run(&["sweep", "--figure", "nonsense", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));

    // Missing or malformed inputs exit 2.
    let out = run(&["decompose", "nonexistent.wav", "--gci", "x.gci"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("v");
    assert!(run(&["synth", "--out", &path_str(&stem)]).status.success());
    let bad_gci = dir.path().join("bad.gci");
    std::fs::write(&bad_gci, "320\n160\n").unwrap();
    let out = run(&[
        "decompose",
        &path_str(&dir.path().join("v.wav")),
        "--gci",
        &path_str(&bad_gci),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("bad.gci:2"), "{}", stderr(&out));

    // Help and version are not errors.
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("decompose"));
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));

    // Invalid synthesis parameters are usage errors.
    let dir2 = tempfile::tempdir().unwrap();
    let out = run(&[
        "synth",
        "--oq",
        "0.1",
        "--out",
        &path_str(&dir2.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn gci_shift_is_applied_and_reported() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("s");
    assert!(run(&["synth", "--out", &path_str(&stem)]).status.success());
    let wav = dir.path().join("s.wav");
    let gci = dir.path().join("s.gci");
    // A +1 ms shift moves every GCI by 16 samples at 16 kHz.
    let out = run(&[
        "decompose",
        &path_str(&wav),
        "--gci",
        &path_str(&gci),
        "--gci-shift-ms",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("s.features.csv")).unwrap();
    let original: Vec<usize> = std::fs::read_to_string(&gci)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let shifted: Vec<usize> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(shifted.len(), original.len());
    for (s, o) in shifted.iter().zip(&original) {
        assert_eq!(*s, o + 16);
    }
}
