//! End-to-end runs of the `simulate` binary.

use std::path::Path;
use std::process::{Command, Output};

fn simulate(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn passing_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), "scenario = free_top\nt_end = 1\n", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("PASS energy")));
    let csv = std::fs::read_to_string(dir.path().join("out/invariants.csv")).unwrap();
    assert!(csv.starts_with("t,energy,Px,Py,Pz,Mx,My,Mz"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], serde_json::Value::Bool(true));
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), "scenario = euler_top\nt_end = 1\ndt = 0.05\ndrift_tol = 1e-15\n", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_error_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), "scenario = static_charge\ngrid_n = 31\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn field_dumps_follow_cadence() {
    let dir = tempfile::tempdir().unwrap();
    let config = "scenario = static_charge\ngrid_n = 16\nbox_length = 16\ndt = 0.1\nt_end = 0.4\n";
    let out = simulate(dir.path(), config, &["--dump-fields", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut dumps: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("fields_"))
        .collect();
    dumps.sort();
    assert_eq!(dumps, ["fields_000000.bin", "fields_000002.bin", "fields_000004.bin"]);
    let file = std::fs::File::open(dir.path().join("out/fields_000004.bin")).unwrap();
    let (grid, t, _) = poincare_lorentz::grid::read_fields(std::io::BufReader::new(file)).unwrap();
    assert_eq!(grid.n(), 16);
    assert!((t - 0.4).abs() < 1e-12);
}
