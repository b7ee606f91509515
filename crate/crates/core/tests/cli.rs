use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockpr")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn spectrum_top_eigenvalue_is_band_width() {
    let v = json(&run(&["spectrum", "--d", "64", "--delta", "4"]));
    assert_eq!(v["nus"][0].as_f64().unwrap(), 7.0);
    assert_eq!(v["nus"].as_array().unwrap().len(), 64);
}

#[test]
fn recover_fixture_is_exact() {
    let grid = fixture("noiseless_grid.csv");
    let truth = fixture("noiseless_signal.csv");
    let v = json(&run(&["recover", "--grid", &grid, "--truth", &truth]));
    assert!(v["error_db"].as_f64().unwrap() <= -160.0, "{v}");
    assert_eq!(v["eigen"]["converged"], Value::Bool(true));
}

#[test]
fn measure_then_recover_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv").display().to_string();
    let signal = dir.path().join("signal.csv").display().to_string();
    let m = run(&[
        "measure", "--d", "48", "--delta", "5", "--kind", "exponential", "--seed", "9", "--format", "csv",
        "--signal-out", &signal, "--out", &grid,
    ]);
    assert!(m.status.success(), "{}", String::from_utf8_lossy(&m.stderr));
    let v = json(&run(&[
        "recover", "--grid", &grid, "--kind", "exponential", "--magnitudes", "blocks", "--eigen", "rayleigh",
        "--truth", &signal,
    ]));
    assert!(v["error_db"].as_f64().unwrap() <= -160.0, "{v}");
}

#[test]
fn noisy_measure_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv").display().to_string();
    let signal = dir.path().join("signal.csv").display().to_string();
    let m = run(&[
        "measure", "--d", "64", "--delta", "4", "--snr", "40", "--format", "csv", "--signal-out", &signal,
        "--out", &grid,
    ]);
    assert!(m.status.success());
    let v = json(&run(&["recover", "--grid", &grid, "--truth", &signal]));
    let db = v["error_db"].as_f64().unwrap();
    assert!((-60.0..-10.0).contains(&db), "{db}");
}

#[test]
fn masks_csv_layout() {
    let out = run(&["masks", "--d", "8", "--delta", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mask,n,re,im"));
    // 2 delta - 1 masks of length delta
    assert_eq!(lines.count(), 3 * 2);
}

#[test]
fn check_bounds_reports_success() {
    let v = json(&run(&["check-bounds", "--d", "16", "--delta", "3", "--trials", "4"]));
    assert_eq!(v["all_hold"], Value::Bool(true));
}

#[test]
fn bench_writes_outputs_and_rejects_empty_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("rows.csv");
    std::fs::write(
        &cfg,
        r#"{"d":[16],"delta":{"rule":"fixed","delta":3},"snr_db":["inf",30],"trials":2,"algorithms":["blockpr"],"seed":4}"#,
    )
    .unwrap();
    let out = run(&["bench", "--config", &cfg.display().to_string(), "--out", &csv.display().to_string()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 2);
    assert!(csv.with_extension("json").exists());

    std::fs::write(&cfg, r#"{"d":[16],"delta":{"rule":"fixed","delta":3},"snr_db":[30],"algorithms":[],"seed":4}"#)
        .unwrap();
    let out = run(&["bench", "--config", &cfg.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["recover", "--grid", "/nonexistent/grid.csv"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(blockpr::cli::cli(["blockpr", "spectrum", "--d", "5", "--delta", "0"]), 1);
}
