use std::path::Path;
use std::process::{Command, Output};

use bilinop_harness::report::without_timing;

fn bilinop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilinop"))
        .args(args)
        .output()
        .expect("spawn bilinop")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn lp_check_json_to_stdout() {
    let out = bilinop(&["lp-check", "--n", "1024", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "lp-check");
    assert_eq!(v["config"]["n"], 1024);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 2);
    assert!(v["results"]["max_round_trip_error"].as_f64().unwrap() < 1e-12);
    assert!(v["timing"].is_object());
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("lp.csv");
    let out = bilinop(&[
        "lp-check",
        "--n",
        "512",
        "--trials",
        "3",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("trial,round_trip_error,parseval_error,reconstruction_error")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn bench_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bench.json",
        r#"{"bench": {"sizes": [512, 1024], "sparse_n": 2048, "sparse_nnz": 8, "repeats": 1}}"#,
    );
    let out = bilinop(&["bench", "--config", &cfg, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,n,strategy,seconds,deviation,radius"));
    assert_eq!(lines.count(), 2 * 3 + 2);
}

#[test]
fn precondition_failures_exit_2() {
    let out = bilinop(&["lp-check", "--n", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("power of two"));

    let out = bilinop(&["lp-check", "--config", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"n": 1024, "colour": "blue"}"#);
    let out = bilinop(&["lp-check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));

    let out = bilinop(&["paraproduct", "--s", "0.25", "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bilinop(&["norm-probe", "--p", "3", "--q", "3", "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("r.json");
    let out = bilinop(&["lp-check", "--n", "256", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn counterexample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ce.json",
        r#"{"counterexample": {"growth": {"enabled": false}, "class_check": {"enabled": true, "j_max_values": [6, 7]}}}"#,
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = bilinop(&["counterexample", "--config", &cfg, "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert_eq!(without_timing(&a).unwrap(), without_timing(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["results"]["identity"]["relative_l2_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["config"]["seed"], 11);
}

#[test]
fn jmax_flag_reaches_the_counterexample() {
    let out = bilinop(&["counterexample", "--n", "8192", "--scale-l", "4", "--jmax", "7", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.starts_with("section,"));
    assert!(text.lines().any(|l| l.starts_with("identity,")));
}
