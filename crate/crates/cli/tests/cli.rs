use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const R0: &str = r#"{"n": 2, "L": 2, "rates": {"1,1": "1", "1,2": "2", "2,1": 3, "2,2": "5"}}"#;

fn rate_file(content: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debruijn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn stationary_worked_example() {
    let f = rate_file(R0);
    let out = run(&["stationary", "--rates", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let probs: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["prob"].as_str().unwrap())
        .collect();
    assert_eq!(probs, ["1/10", "1/8", "3/20", "5/8"]);
    assert_eq!(v["sum"], "1");
    assert_eq!(v["partition_function"]["lcm_oracle"], "120");
    assert_eq!(v["partition_function"]["common_denominator_matches"], true);
}

#[test]
fn bernoulli_rows_as_csv() {
    let out = run(&["stationary", "--special", "bernoulli", "--y", "1,3", "--L", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "word,prob\n11,1/16\n12,3/16\n21,3/16\n22,9/16\n");
}

#[test]
fn input_errors_exit_2() {
    let missing = rate_file(r#"{"n": 2, "L": 2, "rates": {"1,1": "1", "1,2": "2", "2,1": "3"}}"#);
    let out = run(&["stationary", "--rates", missing.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a=2, k=2"));

    let zero = rate_file(r#"{"n": 2, "L": 1, "rates": {"1,1": "0", "2,1": "3"}}"#);
    let out = run(&["spectrum", "--rates", zero.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let f = rate_file(R0);
    let out = run(&[
        "stationary",
        "--rates",
        f.path().to_str().unwrap(),
        "--special",
        "skin-deep",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["stationary"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_worked_example() {
    let f = rate_file(R0);
    let out = run(&["spectrum", "--rates", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["claimed_degree"], 4);
    assert_eq!(v["state_count"], 4);
    let values: Vec<&str> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["eigenvalue"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["-6", "-5", "-4", "0"]);
}

#[test]
fn spectrum_cap_exit_4() {
    let out = run(&["spectrum", "--special", "skin-deep", "--n", "3", "--x", "2", "--L", "3", "--cap", "20"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn correlate_skin_deep() {
    let out = run(&[
        "correlate", "--model", "skin-deep", "--n", "2", "--x", "3", "--i", "1", "--j", "2", "--letters", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["closed_form"], "1/8");
    assert_eq!(v["enumeration"], "1/8");
    assert_eq!(v["matches"], true);

    let f = rate_file(R0);
    let out = run(&["correlate", "--rates", f.path().to_str().unwrap(), "--query", "2:1"]);
    assert_eq!(json(&out)["value"], "1/4");
}

#[test]
fn simulate_is_deterministic_and_close() {
    let f = rate_file(R0);
    let args = [
        "simulate", "--rates", f.path().to_str().unwrap(), "--time", "1e5", "--burn-in", "100", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["tv"].as_f64().unwrap() < 0.02);
    let total: f64 = v["measure"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["empirical"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn verify_covers_every_check() {
    let out = run(&["verify", "--n-max", "2", "--L-max", "3", "--points", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_passed"], true);
    let covered: Vec<&str> = v["coverage"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(covered, debruijn::verify::CHECKS);
    let records = v["records"].as_array().unwrap();
    assert!(records.iter().any(|r| r["point"] == "tied"));
}

#[test]
fn verify_cap_exit_4() {
    let out = run(&["verify", "--n-max", "4", "--L-max", "5"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn export_matrix_formats() {
    let f = rate_file(R0);
    let path = f.path().to_str().unwrap();
    let out = run(&["export-matrix", "--rates", path, "--matrix", "kirchhoff"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["states"][3], "22");
    assert_eq!(v["matrix"][0][0], "-3");
    assert_eq!(v["matrix"][0][2], "2");

    let out = run(&["export-matrix", "--rates", path, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row_word,col_word,value");
    assert_eq!(lines.len(), 1 + 8);
}
