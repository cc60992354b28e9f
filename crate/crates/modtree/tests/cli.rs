//! Integration tests for the `modtree` binary: report round-trips, exit
//! codes, and output invariants.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use modtree::report::Report;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_modtree")
}

fn write_doc(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(contents.as_bytes()).unwrap();
    path.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().unwrap()
}

const BINARY_TREE: &str = r#"{"schema_version":1,"kind":"radial",
    "children":{"rule":"constant","c":2},"weights":{"rule":"unit"}}"#;

const FINITE_TREE: &str = r#"{"schema_version":1,"kind":"finite",
    "parents":[-1,-1,0,0,1],"weights":[1.0,2.0,0.5,1.5,3.0]}"#;

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "binary.json", BINARY_TREE);
    let out = run(&["--json", "modulus", &tree, "-p", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.command, "modulus");
    assert!(report.error.is_none());
    // Full-precision f64 survives the JSON round trip bit-exactly.
    let value = report.outcome["value"].as_f64().unwrap();
    assert_eq!(value.to_bits(), 1.0f64.to_bits());
    let rendered = report.to_json();
    assert_eq!(Report::from_json(&rendered).unwrap(), report);
}

#[test]
fn sweep_is_monotone_nonincreasing() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "binary.json", BINARY_TREE);
    let out = run(&["--json", "sweep", &tree, "-p", "2", "--n-max", "10"]);
    assert!(out.status.success());
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let values: Vec<f64> = report.outcome["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 10);
    for w in values.windows(2) {
        assert!(w[1] <= w[0], "sweep increased: {w:?}");
    }
    let expected = 1.0 / (1.0 - 0.5f64.powi(10));
    assert!((values[9] - expected).abs() < 1e-12);
}

#[test]
fn malformed_input_exits_one_with_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "broken.json", "{\"schema_version\": 1");
    let out = run(&["--json", "validate", &tree]);
    assert_eq!(out.status.code(), Some(1));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.error.is_some());
}

#[test]
fn missing_file_exits_one() {
    let out = run(&["modulus", "/nonexistent/tree.json", "-p", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_and_validate_finite_tree() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "finite.json", FINITE_TREE);
    let out = run(&["--json", "validate", &tree]);
    assert!(out.status.success());
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.outcome["edges"], 5);

    let out = run(&["--json", "solve", &tree, "-p", "2"]);
    assert!(out.status.success());
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let value = report.outcome["value"].as_f64().unwrap();
    let bound = report.outcome["lower_bound"].as_f64().unwrap();
    assert!(value > 0.0 && bound <= value * (1.0 + 1e-9));
    assert_eq!(report.outcome["density"].as_array().unwrap().len(), 5);
}

#[test]
fn edge_cap_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "binary.json", BINARY_TREE);
    let out = Command::new(binary())
        .args(["--json", "dual-bound", &tree, "-p", "2", "-n", "20"])
        .env("MODTREE_MAX_EDGES", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.error.unwrap().contains("100"));
}

#[test]
fn critical_construct_brackets_target() {
    let out = run(&["--json", "critical", "--construct-r", "3", "--resolution", "0.05"]);
    assert!(out.status.success());
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let lo = report.outcome["p_lo"].as_f64().unwrap();
    let hi = report.outcome["p_hi"].as_f64().unwrap();
    assert!(lo <= 3.0 && 3.0 <= hi, "bracket [{lo}, {hi}]");
}

#[test]
fn table_output_has_wall_time_line() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_doc(dir.path(), "binary.json", BINARY_TREE);
    let out = run(&["modulus", &tree, "-p", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("wall time"));
    assert!(text.contains("positive"));
}
