use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use micropolar_lab::csv_io::{read_decay, read_profile, read_snapshot};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_micropolar-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const TINY: &str = "grid.cells = 128\nrun.t_end = 2\nrun.sample_interval = 0.1\nrun.snapshot_interval = 1\n";

#[test]
fn missing_config_is_a_usage_error() {
    let out = run(&["stationary"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_gamma_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.txt", "params.gamma = 0.5\n");
    let out = run(&["stationary", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    let cfg = write_config(dir.path(), "d.txt", "grid.cellz = 5\n");
    assert_eq!(run(&["simulate", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn subsonic_reports_nonexistence_with_success() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.txt", "params.mach = 0.5\nregime.hint = nonexistent\n");
    let out_dir = dir.path().join("run");
    let out = run(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("regime: nonexistent"));
    assert!(report.contains("RESULT regime_hint PASS"));
    assert!(!out_dir.join("decay.csv").exists());
    assert!(!out_dir.join("profile.csv").exists());
}

#[test]
fn stationary_writes_profile_and_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.txt", "grid.cells = 512\n");
    let out_dir = dir.path().join("st");
    let out = run(&["stationary", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let prof = read_profile(&out_dir.join("profile.csv")).unwrap();
    assert_eq!(prof.x.len(), 513);
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("RESULT envelope_constant PASS"), "{report}");
    assert!(report.contains("RESULT tail_rate PASS"));
}

#[test]
fn simulate_is_deterministic_and_rates_refits_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.txt", TINY);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&["simulate", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["profile.csv", "decay.csv", "snapshots/snap_00000.csv", "snapshots/snap_00001.csv", "snapshots/snap_00002.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let snap = read_snapshot(&a.join("snapshots/snap_00002.csv")).unwrap();
    assert_eq!(snap.t, 2.0);

    let decay = read_decay(&a.join("decay.csv")).unwrap();
    assert_eq!(decay.t.len(), 21);
    let r1 = run(&["rates", "--config", &cfg, "--out", a.to_str().unwrap()]);
    let r2 = run(&["rates", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert_eq!(r1.status.code(), Some(0));
    assert_eq!(r1.stdout, r2.stdout);
    let text = String::from_utf8_lossy(&r1.stdout);
    let fitted = decay.footer["fitted_exponent"].clone();
    assert!(text.contains(&format!("fitted_exponent: {fitted}")), "{text}");
}

#[test]
fn rates_without_prior_run_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.txt", TINY);
    let out = run(&["rates", "--config", &cfg, "--out", dir.path().join("none").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_suite_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.lines().filter(|l| l.starts_with("RESULT")).count() >= 10);
    assert!(!text.contains(" FAIL "));
    assert_eq!(fs::read_to_string(dir.path().join("check.txt")).unwrap(), text);
}
