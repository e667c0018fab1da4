use std::process::{Command, Output};

fn herzlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herzlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_the_case() {
    let out = herzlab(&["classify", "--n", "3", "--alpha", "3", "--gamma", "0", "--s", "0", "--q", "3", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["kind"], "classify");
    assert_eq!(v["pass"], true);
    assert_eq!(v["details"]["case"], "DoubleCritical");
}

#[test]
fn divergent_norm_is_not_a_failure() {
    let out = herzlab(&["norm", "--func", "gaussian", "--width", "1", "--s", "-3/2", "--q", "2", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out).to_string().contains("Divergent"));
}

#[test]
fn unknown_key_is_a_usage_error() {
    let out = herzlab(&["density", "--set", "bogus_key=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
    assert!(out.stdout.is_empty());
}

#[test]
fn standing_assumption_violation_exits_2() {
    let out = herzlab(&["classify", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    // An impossible band forces the ratio check to fail.
    let out = herzlab(&["interp", "--set", "band=1.0001"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL interp"));
}

#[test]
fn writes_report_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("csv");
    std::fs::create_dir(&csv).unwrap();
    let out = herzlab(&[
        "membership",
        "--out",
        report.to_str().unwrap(),
        "--csv-dir",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["kind"], "membership");
    let written = std::fs::read_dir(&csv).unwrap().count();
    let traces = v["traces"].as_array().map_or(0, |t| t.len());
    assert_eq!(written, traces);
}

#[test]
fn suite_runs_listed_experiments_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fast.cfg");
    std::fs::write(&cfg, "experiments = density, classify, membership\n").unwrap();
    let out = herzlab(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let kinds: Vec<_> = json(&out).as_array().unwrap().iter().map(|r| r["kind"].as_str().unwrap().to_string()).collect();
    assert_eq!(kinds, ["density", "classify", "membership"]);
}
