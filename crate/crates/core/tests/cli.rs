use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convexity-testbed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn shatter_triangle_frequency_is_one() {
    let r = report(&run(&["shatter", "--n", "2", "--m", "3", "--trials", "1000"]));
    assert_eq!(r["metrics"]["frequency"], 1.0);
    assert_eq!(r["config"]["params"]["trials"], 1000);
}

#[test]
fn unknown_key_exits_two_and_names_it() {
    let out = run(&["shatter", "--n", "2", "--m", "3", "--set", "epsilonn=0.1", "--set", "mm=2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("epsilonn") && err.contains("\"mm\""), "{err}");
}

#[test]
fn bad_flag_value_exits_two() {
    assert_eq!(run(&["shatter", "--n", "two"]).status.code(), Some(2));
}

#[test]
fn infeasible_grid_exits_three() {
    let out = run(&["test-one-sided", "--n", "3", "--eps", "0.1", "--target", r#"{"kind":"full","n":3}"#]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn target_file_and_reproducible_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.json");
    std::fs::write(&target, r#"{"kind":"stripe","n":2,"thresholds":5}"#).unwrap();
    let args = |out: &str| {
        vec![
            "test-one-sided".to_string(),
            "--n".into(),
            "2".into(),
            "--eps".into(),
            "0.2".into(),
            "--ell".into(),
            "0.5".into(),
            "--nprime".into(),
            "1.5".into(),
            "--runs".into(),
            "8".into(),
            "--guarded".into(),
            "true".into(),
            "--seed".into(),
            "4".into(),
            "--target".into(),
            target.to_str().unwrap().into(),
            "--output".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = bin().args(args(p.to_str().unwrap())).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let mut ra: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    let mut rb: Value = serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap();
    assert_eq!(ra["metrics"]["verdict"]["decision"], "reject");
    assert_eq!(ra["metrics"]["certificate_check"]["verified"], true);
    assert_eq!(ra["derived"]["reject_threshold"]["source"], "override");
    assert_eq!(ra["derived"]["ell"]["source"], "override");
    for r in [&mut ra, &mut rb] {
        r["wall_clock_ms"] = Value::Null;
        r["config"]["output_path"] = Value::Null;
    }
    assert_eq!(ra, rb);
}

#[test]
fn clamps_are_flagged() {
    let r = report(&run(&["gen-dyes", "--n", "16", "--seed", "3"]));
    assert_eq!(r["derived"]["alpha"]["source"], "clamped");
    assert_eq!(r["derived"]["N"]["source"], "default");
    assert_eq!(r["metrics"]["polytope"]["normals"].as_array().unwrap().len(), 16);
}

#[test]
fn trial_log_is_csv() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("shells.csv");
    let out = run(&["gen-dno", "--n", "4", "--shells", "8", "--trial-log", log.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&log).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "shell,t,mass,rho,included");
    assert_eq!(lines.len(), 9);
}

#[test]
fn sweep_writes_combined_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = bin()
        .args(["sweep", "--command", "shatter", "--axis", "n", "--values", "0,1,2"])
        .args(["--set", "m=3", "--set", "trials=200", "--output", csv.to_str().unwrap()])
        .env("CONVEXITY_TESTBED_JOBS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cell 0"));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(!rows[0][col("error")].is_empty());
    assert_eq!(&rows[1][col("frequency")], "0.0");
    assert_eq!(&rows[2][col("frequency")], "1.0");
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "test-one-sided",
        "test-two-sided",
        "gen-dyes",
        "gen-dno",
        "distinguish",
        "shatter",
        "typicality",
        "boundary-volume",
        "ball-theorem",
        "appendix-lemmas",
        "cover",
        "sweep",
    ] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
    }
}
