use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmlab"))
        .args(args)
        .env_remove("KMLAB_TERM_BUDGET")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn laguerre_prints_exact_equal_lines() {
    let out = kmlab(&["verify", "laguerre", "--max-k", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let ls = lines(&out);
    assert_eq!(ls.iter().filter(|l| l["status"] == "exact-equal").count(), 13);
    assert_eq!(ls.last().unwrap()["passed"], true);
}

#[test]
fn ikeda_reports_zero_with_four_terms() {
    let out = kmlab(&["verify", "ikeda", "--p", "2", "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &lines(&out)[0];
    assert_eq!(rep["result"], "zero");
    assert_eq!(rep["term_count"], 4);
    assert_eq!(rep["certificates"].as_array().unwrap().len(), 4);
}

#[test]
fn sign_mismatch_is_an_assertion_failure() {
    let out = kmlab(&["verify", "signs", "--p", "2", "--q", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = &lines(&out)[0];
    assert_eq!(rep["checked"], 4);
    assert_eq!(rep["agree_closed_form"], 4);
    assert_eq!(rep["agree_expected"], 2);
}

#[test]
fn malformed_lattice_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"disc": -4, "rank": 1, "gram": [[1]]}"#);
    let out = kmlab(&["lattice", "theta", "--lattice", s(&l), "--bound", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(lines(&out).last().unwrap()["error"]["kind"], "input");
    assert!(!out.stderr.is_empty());
}

#[test]
fn theta_counts_sums_of_two_squares() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"disc": -4, "rank": 1, "gram": [[[1, 0]]]}"#);
    let out = kmlab(&["lattice", "theta", "--lattice", s(&l), "--bound", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let counts: Vec<(String, u64)> = lines(&out)
        .iter()
        .filter(|v| v.get("norm").is_some())
        .map(|v| (v["norm"].as_str().unwrap().to_string(), v["count"].as_u64().unwrap()))
        .collect();
    assert!(counts.contains(&("0".into(), 1)));
    assert!(counts.contains(&("5".into(), 8)));
    assert!(counts.contains(&("25".into(), 12)));
    assert!(!counts.iter().any(|(n, _)| n == "3"));
}

#[test]
fn grouping_and_cap_limit() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.json", r#"{"min_poly": [-2, 0, 1]}"#);
    let l = write(&dir, "l.json", r#"{"disc": -4, "rank": 1, "gram": [[[1, 0]]]}"#);
    let out = kmlab(&["lattice", "grouping", "--field", s(&f), "--lattice", s(&l), "--b", "3,2", "--bound", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &lines(&out)[0];
    assert_eq!((rep["beta_total"].as_u64(), rep["direct_total"].as_u64()), (Some(4), Some(4)));

    let out = kmlab(&["lattice", "grouping", "--field", s(&f), "--lattice", s(&l), "--b", "20,1", "--bound", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn term_budget_env_is_a_resource_limit() {
    let out = Command::new(env!("CARGO_BIN_EXE_kmlab"))
        .args(["verify", "ikeda", "--p", "2", "--q", "2"])
        .env("KMLAB_TERM_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn trace_dual_passes_and_integral_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.json", r#"{"min_poly": ["-1", "-1", "1"]}"#);
    let out = kmlab(&["verify", "trace", "--field", s(&f), "--ring", "-3", "--samples", "30"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["matches"], 30);
    let out = kmlab(&["verify", "trace", "--field", s(&f), "--ring", "gaussian", "--samples", "30", "--basis", "integral"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn series_json_matches_hand_value_and_csv_is_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let v = write(
        &dir,
        "v.json",
        r#"[{"b": [1], "i": 0, "vol": 2, "mult": 1}, {"b": [2], "i": 0, "vol": "1/2", "mult": 2}]"#,
    );
    let out = kmlab(&["series", "assemble", "--volumes", s(&v), "--tau", "0.2+0.45i", "--m", "2", "--c0", "-0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &lines(&out)[0];
    let tau = num_complex::Complex64::new(0.2, 0.45);
    let q = (num_complex::Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau).exp();
    let hand = -0.5 + q * 2.0 + q * q;
    let got = num_complex::Complex64::new(rep["value"][0].as_f64().unwrap(), rep["value"][1].as_f64().unwrap());
    assert!((got - hand).norm() < 1e-12);

    let out = kmlab(&["series", "assemble", "--volumes", s(&v), "--tau", "0.2+0.45i", "--m", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "b0,abs,arg");
    assert_eq!(rows.len(), 3);
}

#[test]
fn out_of_half_plane_tau_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let v = write(&dir, "v.json", r#"[{"b": [1], "i": 0, "vol": 1, "mult": 1}]"#);
    let out = kmlab(&["series", "assemble", "--volumes", s(&v), "--tau", "0.2-0.5i", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = kmlab(&["verify", "fiber", "--trials", "5", "--seed", "3"]);
    let b = kmlab(&["verify", "fiber", "--trials", "5", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn help_names_the_identity() {
    let out = kmlab(&["verify", "ikeda", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Ikeda map kills"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(kmlab(&["verify", "ikeda", "--p", "x", "--q", "1"]).status.code(), Some(2));
    assert_eq!(kmlab(&["lattice", "theta", "--lattice", "/nonexistent.json", "--bound", "3"]).status.code(), Some(2));
}
