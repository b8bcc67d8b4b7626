use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const REFERENCE: &str =
    r#"{"version": 1, "model": "vdw", "C5": 240, "samples": 400, "front_samples": 40}"#;

fn gasflow(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasflow"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn gasflow")
}

fn scenario(dir: &TempDir, json: &str) -> std::path::PathBuf {
    let path = dir.path().join("scenario.json");
    fs::write(&path, json).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tstar_prints_both_estimates() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, REFERENCE);
    let o = gasflow(&["tstar"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let values: Vec<f64> = stdout(&o)
        .lines()
        .filter_map(|l| l.split(':').nth(1)?.split_whitespace().next()?.parse().ok())
        .collect();
    assert_eq!(values.len(), 2);
    for v in values {
        assert!((v - 12.53).abs() < 0.01, "{v}");
    }
}

#[test]
fn profile_at_initial_time_is_single_valued() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, REFERENCE);
    let o = gasflow(&["profile", "--times", "0"], &cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(
        stdout(&o).contains("t = 0: 1 branches, at most 1 per x"),
        "{}",
        stdout(&o)
    );
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("rho"));
    let cols = header.split(',').count();
    for line in lines {
        assert_eq!(line.split(',').count(), cols);
    }
}

#[test]
fn verify_passes_on_reference() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, REFERENCE);
    let o = gasflow(&["verify"], &cfg, dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, REFERENCE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for sub in ["thermo", "caustic", "shock", "phase-curve"] {
        assert!(gasflow(&[sub], &cfg, &a).status.success(), "{sub}");
    }
    for sub in ["thermo", "caustic", "shock", "phase-curve"] {
        let o = Command::new(env!("CARGO_BIN_EXE_gasflow"))
            .env("GASFLOW_THREADS", "1")
            .args([sub, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&b)
            .output()
            .unwrap();
        assert!(o.status.success(), "{sub}");
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 6, "{names:?}");
    for name in names {
        let x = fs::read(a.join(&name)).unwrap();
        let y = fs::read(b.join(&name)).unwrap();
        assert!(x == y, "{name:?} differs between runs");
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    for bad in [
        "{not json",
        r#"{"version": 2, "model": "vdw", "C5": 240}"#,
        r#"{"version": 1, "model": "vdw"}"#,
        r#"{"version": 1, "model": "vdw", "C5": 240, "s0": 7}"#,
        r#"{"version": 1, "model": "vdw", "C5": 240, "unknown": 1}"#,
    ] {
        let cfg = scenario(&dir, bad);
        let o = gasflow(&["tstar"], &cfg, dir.path());
        assert_eq!(o.status.code(), Some(1), "{bad}");
    }
    let o = gasflow(&["tstar"], &dir.path().join("missing.json"), dir.path());
    assert_eq!(o.status.code(), Some(1));

    let cfg = scenario(&dir, REFERENCE);
    let o = Command::new(env!("CARGO_BIN_EXE_gasflow"))
        .env("GASFLOW_THREADS", "zero")
        .args(["tstar", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, r#"{"version": 1, "model": "ideal", "s0": 0}"#);
    let o = gasflow(&["phase-curve"], &cfg, dir.path());
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let cfg = scenario(
        &dir,
        r#"{"version": 1, "model": "vdw", "C5": 240, "t_max": 5}"#,
    );
    let o = gasflow(&["shock"], &cfg, dir.path());
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
