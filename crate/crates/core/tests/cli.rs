use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn peakon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakon")).args(args).output().expect("spawn peakon")
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

const COLLISION: &str = r#"{
    "schema": 1,
    "name": "peakon-antipeakon",
    "initial": {"peakons": [[1.0, 0.4], [-1.0, 0.6]]},
    "t_final": 2.0,
    "samples": 21
}"#;

#[test]
fn simulate_writes_tables_and_finds_the_collision() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), COLLISION);
    let out = dir.path().join("out");
    let o = peakon(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "conservation.csv", "events.csv", "record.json", "verdicts.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let header = fs::read_to_string(out.join("conservation.csv")).unwrap();
    assert!(header.starts_with("t,regime,energy,hamiltonian,momentum\n"));
    let events = csv_rows(&out.join("events.csv"));
    assert_eq!(events.len(), 1);
    let qbar: f64 = events[0][1].parse().unwrap();
    assert!((qbar - 0.5).abs() < 1e-9);
    assert_eq!(csv_rows(&out.join("trajectory.csv")).len(), 42);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(
        dir.path(),
        r#"{"schema": 1, "initial": {"peakons": [[1.0, 0.3], [-0.5, 0.7]]},
            "partner": {"peakons": [[1.01, 0.31], [-0.5, 0.7]]}, "t_final": 0.5, "samples": 3}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = peakon(&["metric", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let seq = dir.path().join("seq");
    let o = peakon(&["metric", "--config", &cfg, "--out", seq.to_str().unwrap(), "--sequential"]);
    assert!(o.status.success());
    for f in ["metric.csv", "trajectory.csv", "record.json", "verdicts.json"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(x, fs::read(seq.join(f)).unwrap(), "{f} sequential");
    }
}

#[test]
fn identical_metric_pair_has_zero_upper_bound() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(
        dir.path(),
        r#"{"schema": 1, "initial": {"peakons": [[0.8, 0.2]]},
            "partner": {"peakons": [[0.8, 0.2]]}, "t_final": 0.3, "samples": 4}"#,
    );
    let out = dir.path().join("out");
    let o = peakon(&["metric", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed-suite", "identity"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let rows = csv_rows(&out.join("metric.csv"));
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[6], "identity");
    }
}

#[test]
fn approx_from_flags() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = peakon(&["approx", "--datum", "sin", "--n", "8,16,32,64", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let rows = csv_rows(&out.join("approx.csv"));
    let errs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS error-ratio"), "{stdout}");
}

#[test]
fn approx_with_one_peakon() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = peakon(&["approx", "--datum", "constant", "--n", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&out.join("approx.csv")).len(), 1);
}

#[test]
fn verify_kernel_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = peakon(&["verify", "kernel", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let verdicts: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verdicts.json")).unwrap()).unwrap();
    let rows = verdicts.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for v in rows {
        for key in ["id", "inequality", "constant", "measured", "slack", "pass"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = peakon(&["verify", "nonsense", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown verification suite"));

    let cfg = write_scenario(dir.path(), r#"{"schema": 7}"#);
    let o = peakon(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = peakon(&["simulate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_verdict_sets_exit_code_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(
        dir.path(),
        r#"{"schema": 1, "initial": {"peakons": [[1.0, 0.4], [-1.0, 0.6]]}, "t_final": 2.0, "drift_tol": 1e-300}"#,
    );
    let out = dir.path().join("out");
    let o = peakon(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn zero_momentum_data_pass_the_drift_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), r#"{"schema": 1, "initial": {"datum": "sin", "n": 16}, "t_final": 0.5}"#);
    let out = dir.path().join("out");
    let o = peakon(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}
