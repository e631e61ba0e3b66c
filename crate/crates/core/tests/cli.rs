use std::process::Command;

use fourier_detect::cli::run_to;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fdetect").chain(args.iter().copied());
    let code = run_to(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn assert_schema(v: &Value, command: &str) {
    for key in ["tool_version", "command", "inputs", "results", "summary", "timestamp"] {
        assert!(v.get(key).is_some(), "missing {key} in {v}");
    }
    assert_eq!(v["command"], command);
    for key in ["group", "chars", "set", "k", "seed", "tolerances"] {
        assert!(v["inputs"].get(key).is_some(), "missing inputs.{key}");
    }
}

#[test]
fn select_reports_bound_and_trace() {
    let v = run_json(&["select", "--group", "16", "--chars", "0,4,8,12", "--k", "8", "--format", "json"]);
    assert_schema(&v, "select");
    let achieved = v["results"]["achieved"].as_f64().unwrap();
    assert!(achieved < 1.5);
    assert_eq!(v["results"]["bounds"]["one_sided"].as_f64(), Some(1.5));
    assert_eq!(v["results"]["potential_trace"].as_array().unwrap().len(), 9);
    assert_eq!(v["results"]["margins"]["feasibility"].as_array().unwrap().len(), 8);
    assert_eq!(v["inputs"]["k"], 8);
}

#[test]
fn detect_single_vector() {
    let v = run_json(&["detect", "--group", "8", "--set", "0,1", "--char", "3"]);
    assert_schema(&v, "detect");
    assert!((v["results"]["detection"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn uncertainty_exhaustive_prime() {
    let v = run_json(&["uncertainty", "--group", "5", "--exhaustive", "--max-sum", "5"]);
    assert_schema(&v, "uncertainty");
    assert_eq!(v["summary"]["intersections"], 0);
    assert_eq!(v["summary"]["violations"], 0);
}

#[test]
fn uncertainty_single_pair_on_comb() {
    let v = run_json(&["uncertainty", "--group", "9", "--set", "0,3,6", "--chars", "0,3,6"]);
    assert_eq!(v["results"]["intersects"], true);
    assert_eq!(v["results"]["violation"], false);
}

#[test]
fn comb_and_exchange() {
    let v = run_json(&["comb", "--n", "4"]);
    assert!(v["results"]["overlap_norm"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert_eq!(v["results"]["support"].as_array().unwrap().len(), 4);

    let v = run_json(&["exchange", "--group", "12", "--chars", "0,4,8"]);
    assert_eq!(v["results"]["size"], 9);
    assert!(v["results"]["sigma_min"].as_f64().unwrap() > 1e-8);
}

#[test]
fn twosided_oracle_and_heuristic() {
    let v = run_json(&["twosided", "--group", "16", "--chars", "1,6", "--k", "8"]);
    assert_eq!(v["results"]["method"], "oracle");
    assert!(v["results"]["measured_constant"].as_f64().unwrap() >= 0.0);

    let v = run_json(&["twosided", "--group", "16", "--chars", "1,6", "--k", "8", "--heuristic"]);
    assert_eq!(v["results"]["method"], "greedy-one-sided-heuristic");

    // Falls back to the heuristic when enumeration would exceed the cap.
    let v = run_json(&["twosided", "--group", "16", "--chars", "1,6", "--k", "8", "--enum-cap", "100"]);
    assert_eq!(v["results"]["method"], "greedy-one-sided-heuristic");
}

#[test]
fn experiments_via_cli() {
    let v = run_json(&["mc-intersect", "--n", "2", "--N", "4", "--trials", "10", "--seed", "3"]);
    assert_schema(&v, "mc-intersect");
    assert_eq!(v["results"]["trials"].as_array().unwrap().len(), 10);

    let v = run_json(&["sweep-eps", "--groups", "16,32", "--dims", "1"]);
    assert_eq!(v["summary"]["all_within_bound"], true);

    let v = run_json(&["half-split", "--group", "8", "--chars", "2", "--oracle"]);
    assert!((v["summary"]["pq_norm"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn csv_rows_match_steps_and_trials() {
    let (code, out, _) = run(&["select", "--group", "32", "--chars", "0,8,16,24", "--k", "12", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "min_condition"));
    assert_eq!(reader.records().count(), 12);

    let (code, out, _) = run(&["mc-intersect", "--n", "2", "--N", "4", "--trials", "7", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    // Floats round-trip exactly.
    let col = reader.headers().unwrap().iter().position(|h| h == "overlap_norm").unwrap();
    let x: f64 = rows[0][col].parse().unwrap();
    let v = run_json(&["mc-intersect", "--n", "2", "--N", "4", "--trials", "7"]);
    assert_eq!(v["results"]["trials"][0]["overlap_norm"].as_f64(), Some(x));
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["select", "--group", "16", "--chars", "0,16", "--k", "2"][..],
        &["select", "--group", "16", "--chars", "0,4", "--k", "17"],
        &["select", "--group", "4", "--chars", "0,1,2,3", "--k", "2"],
        &["select", "--group", "1x4", "--chars", "0", "--k", "1"],
        &["detect", "--group", "8", "--set", "0,1"],
        &["select", "--group", "16", "--chars", "0", "--k", "1", "--no-such-flag"],
        &["frobnicate"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn error_report_is_written_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let (code, _, err) = run(&["select", "--group", "4", "--chars", "0,1,2,3", "--k", "2", "--output", p]);
    assert_eq!(code, 1);
    assert_eq!(err.lines().count(), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["error"]["kind"], "degenerate_frame");
}

#[test]
fn output_file_receives_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = run(&["detect", "--group", "8", "--set", "0,1", "--chars", "0", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["results"]["overlap_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn loaded_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h4.txt");
    std::fs::write(
        &path,
        "# Sylvester-Hadamard / 2\n4\n0.5 0.5 0.5 0.5\n0.5 -0.5 0.5 -0.5\n0.5 0.5 -0.5 -0.5\n0.5 -0.5 -0.5 0.5\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = run_json(&["basis-check", "--basis", p]);
    assert_eq!(v["results"]["unitary"], true);
    let v = run_json(&["detect", "--basis", p, "--set", "0,2,3", "--char", "1"]);
    assert!((v["results"]["detection"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    std::fs::write(&path, "2\n0.45 0.45\n0.45 -0.45\n").unwrap();
    let (code, _, err) = run(&["basis-check", "--basis", p]);
    assert_eq!(code, 1);
    assert!(err.contains("flat"), "{err}");
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn enum_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fdetect"))
        .args(["twosided", "--group", "16", "--chars", "1,6", "--k", "8"])
        .env("FDETECT_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["method"], "greedy-one-sided-heuristic");
    assert_eq!(v["inputs"]["tolerances"]["enum_cap"], 10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fdetect");
    let ok = Command::new(bin).args(["comb", "--n", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["comb", "--n", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let bad_tol = Command::new(bin)
        .args(["select", "--group", "16", "--chars", "0,4", "--k", "4", "--feasibility-tol=-0.5"])
        .output()
        .unwrap();
    assert_eq!(bad_tol.status.code(), Some(1));
}
