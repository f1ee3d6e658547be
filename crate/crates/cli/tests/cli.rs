use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use g2lab_cli::Report;

fn g2lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2lab")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_report(path: &Path) -> Report {
    Report::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_torsion_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = g2lab(&["verify-torsion", "--samples", "100", "--seed", "7", "--out", out]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let report = read_report(&dir.path().join("verify-torsion.json"));
    assert_eq!(report.seed, 7);
    assert_eq!(report.parameters["samples"], 100.0);
    let c = report.checks.iter().find(|c| c.name == "torsion_forms").unwrap();
    assert!(c.value <= 1e-10);
    assert!(report.rng.contains("ChaCha8"));
}

#[test]
fn zero_torsion_flow_keeps_metric_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("examples/flow-w345-zero.toml");
    let res = g2lab(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("flow-w345-zero.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,functional,norm_F,h_min,h_max,min_eig_g,trT,constraint_residual");
    let metric = std::fs::read_to_string(dir.path().join("flow-w345-zero_metric.csv")).unwrap();
    let rows: Vec<Vec<&str>> = metric.lines().skip(1).map(|l| l.split(',').skip(1).collect()).collect();
    assert!(rows.len() > 2);
    assert!(rows.iter().all(|r| r == &rows[0]));
}

#[test]
fn missing_scenario_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 3\n").unwrap();
    let res = g2lab(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("scenario"));
    std::fs::write(&cfg, "scenario = \"verify-torsion\"\nsamples = 3\nlucky = true\n").unwrap();
    let res = g2lab(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("lucky"));
    let res = g2lab(&["flow-gh", "--config", configs().join("1-verify-torsion.toml").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(g2lab(&["run"]).status.code(), Some(2));
    assert_eq!(g2lab(&["verify-torsion", "--samples", "zero"]).status.code(), Some(2));
}

#[test]
fn invariant_failure_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let res = g2lab(&["verify-torsion", "--samples", "3", "--tolerance", "1e-30", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let report = read_report(&dir.path().join("verify-torsion.json"));
    assert_eq!(report.status(), "FAIL");
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let cfg = configs().join("5-flow-gh-homogeneous.toml");
        let res = g2lab(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0));
    }
    for file in ["flow-gh-homogeneous.json", "flow-gh-homogeneous.csv"] {
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
    }
}

#[test]
fn summarize_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(g2lab(&["functional-signs", "--samples", "10", "--out", out]).status.code(), Some(0));
    let pass = dir.path().join("functional-signs.json");
    let res = g2lab(&["summarize", pass.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let table = String::from_utf8(res.stdout).unwrap();
    assert_eq!(table.lines().count(), 2);
    assert!(table.lines().nth(1).unwrap().contains("\tPASS\t"));

    let fail_dir = dir.path().join("fail");
    let res = g2lab(&["verify-torsion", "--samples", "2", "--tolerance", "1e-30", "--out", fail_dir.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let fail = fail_dir.join("verify-torsion.json");
    let res = g2lab(&["summarize", pass.to_str().unwrap(), fail.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8(res.stdout).unwrap().contains("\tFAIL\t"));

    assert_eq!(g2lab(&["summarize"]).status.code(), Some(2));
    assert_eq!(g2lab(&["summarize", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
}
