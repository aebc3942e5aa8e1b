//! End-to-end tests against the compiled binary: file round trips, seed
//! control, and the 0/1/2 exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mesoscale");

fn mesoscale(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn small_ising_config() -> &'static str {
    r#"{
        "system": { "kind": "ising", "temperature": 2.2 },
        "L": 16,
        "scales": [1, 2, 4],
        "trials_per_scale": 6,
        "replicates": 2,
        "master_seed": 41
    }"#
}

/// A six-scale curve with a clear interior peak, in the emitted CSV format.
fn peaked_csv() -> String {
    let mut text = String::from("system,block_size,ei_mean_bits,ei_sem_bits,replicates,seed\n");
    let rows = [
        (1, 0.03, 0.001),
        (2, 0.20, 0.003),
        (4, 0.69, 0.007),
        (8, 1.32, 0.014),
        (16, 1.46, 0.016),
        (32, 1.08, 0.051),
    ];
    for (b, mean, sem) in rows {
        text.push_str(&format!("ising,{b},{mean},{sem},10,7\n"));
    }
    text
}

#[test]
fn simulate_writes_curve_svg_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), small_ising_config()).unwrap();

    let out = mesoscale(
        dir.path(),
        &["simulate", "ising", "--config", "cfg.json", "--out", "run.csv", "--svg", "run.svg"],
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("peak at b="));

    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.starts_with("system,block_size,ei_mean_bits,ei_sem_bits,replicates,seed\n"));
    assert_eq!(csv.lines().count(), 4);

    let svg = std::fs::read_to_string(dir.path().join("run.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>\n") || svg.ends_with("</svg>"));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 41);
    assert_eq!(manifest["config"]["L"], 16);
    assert!(manifest["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn same_seed_reproduces_bytes_and_seed_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), small_ising_config()).unwrap();

    let first = mesoscale(dir.path(), &["simulate", "ising", "--config", "cfg.json", "--out", "a.csv"]);
    let second = mesoscale(dir.path(), &["simulate", "ising", "--config", "cfg.json", "--out", "b.csv"]);
    assert!(first.status.success() && second.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let third = mesoscale(
        dir.path(),
        &["simulate", "ising", "--config", "cfg.json", "--out", "c.csv", "--seed", "99"],
    );
    assert!(third.status.success());
    let c = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_ne!(std::str::from_utf8(&a).unwrap(), c);
    assert!(c.lines().skip(1).all(|line| line.ends_with(",99")));
}

#[test]
fn config_errors_exit_1_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), small_ising_config()).unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();

    let mismatch = mesoscale(dir.path(), &["simulate", "abm", "--config", "cfg.json"]);
    assert_eq!(mismatch.status.code(), Some(1), "stderr: {}", stderr(&mismatch));
    assert!(stderr(&mismatch).contains("abm"));

    let broken = mesoscale(dir.path(), &["simulate", "ising", "--config", "broken.json"]);
    assert_eq!(broken.status.code(), Some(1));

    let missing = mesoscale(dir.path(), &["analyze", "nope.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("nope.csv"));

    let bad_flag = mesoscale(dir.path(), &["simulate", "ising", "--confg", "cfg.json"]);
    assert_eq!(bad_flag.status.code(), Some(1));
}

#[test]
fn analyze_reports_peak_and_model_selection() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("curve.csv"), peaked_csv()).unwrap();

    let out = mesoscale(dir.path(), &["analyze", "curve.csv", "--seed", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("peak at b=16"), "{text}");
    assert!(text.contains("best shape: unimodal"), "{text}");
    assert!(text.contains("model peak at b=16"), "{text}");

    // Same seed, same report.
    let again = mesoscale(dir.path(), &["analyze", "curve.csv", "--seed", "3"]);
    assert_eq!(text, stdout(&again));
}

#[test]
fn analyze_skips_model_selection_on_short_curves() {
    let dir = tempfile::tempdir().unwrap();
    let short: String = peaked_csv().lines().take(4).collect::<Vec<_>>().join("\n");
    std::fs::write(dir.path().join("short.csv"), short).unwrap();

    let out = mesoscale(dir.path(), &["analyze", "short.csv"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("model selection skipped"));
}

#[test]
fn theory_locates_the_exponential_peak() {
    let dir = tempfile::tempdir().unwrap();

    let out = mesoscale(dir.path(), &["theory", "--model", "exp", "--lambda", "8", "--d", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("ell* = 8.0000"), "{}", stdout(&out));

    let flat = mesoscale(dir.path(), &["theory", "--model", "power", "--alpha", "1.0", "--d", "2"]);
    assert!(flat.status.success());
    assert!(stdout(&flat).contains("no interior peak"));

    let missing = mesoscale(dir.path(), &["theory", "--model", "exp", "--d", "2"]);
    assert_eq!(missing.status.code(), Some(1));

    let extra = mesoscale(
        dir.path(),
        &["theory", "--model", "exp", "--lambda", "8", "--alpha", "1", "--d", "2"],
    );
    assert_eq!(extra.status.code(), Some(1));
}

#[test]
fn plot_renders_a_saved_curve() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("curve.csv"), peaked_csv()).unwrap();

    let out = mesoscale(dir.path(), &["plot", "curve.csv", "-o", "curve.svg", "--seed", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert!(svg.contains("peak b=16"));
}

#[test]
fn sweep_writes_good_entries_even_when_one_fails() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = r#"[
        { "system": { "kind": "ising", "temperature": 2.0 }, "L": 16, "scales": [1, 2],
          "trials_per_scale": 4, "replicates": 2, "master_seed": 1 },
        { "system": { "kind": "ising", "temperature": 2.0 }, "L": 16, "scales": [3],
          "trials_per_scale": 4, "replicates": 2, "master_seed": 2 }
    ]"#;
    std::fs::write(dir.path().join("sweep.json"), sweep).unwrap();

    let out = mesoscale(dir.path(), &["sweep", "--config", "sweep.json", "--out-dir", "out"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("does not divide"));

    let entries: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(entries.iter().any(|name| name.starts_with("00_ising") && name.ends_with(".csv")));
    assert!(entries.iter().any(|name| name.ends_with(".manifest.json")));
}
