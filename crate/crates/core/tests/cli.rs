//! End-to-end behaviour of the `gkv` binary: exit codes, reports, sections.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gkv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkv")).args(args).output().expect("run gkv")
}

fn arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn emit(dir: &Path, name: &str, params: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["zoo", name, "--emit", arg(&path)];
    for p in params {
        args.extend(["--param", p]);
    }
    let out = gkv(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

#[test]
fn zoo_prints_a_loadable_spec() {
    let out = gkv(&["zoo", "Z1", "--param", "alpha=0.6", "--param", "beta=0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let spec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spec["dim"], 4);
    assert_eq!(spec["parameters"]["alpha"], 0.6);
}

#[test]
fn z1_passes_and_reports_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z1", &["alpha=0.36", "beta=0.48", "gamma=0.8"]);
    let out = gkv(&["check", arg(&spec), "--suite", "gk", "--grid", "3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["meta"]["suite"], "gk");
    assert_eq!(r["meta"]["seed"], 5);
    assert_eq!(r["meta"]["grid"], 3);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["checkName"].as_str().unwrap()).collect();
    assert!(names.contains(&"gk.nijenhuis_plus") && names.contains(&"gk.parallel_minus"));
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z1", &["alpha=0.36", "beta=0.48", "gamma=0.8"]);
    let ok = gkv(&["check", arg(&spec), "--suite", "courant"]);
    assert_eq!(ok.status.code(), Some(0));
    // rounding in the bracket leaves residuals far above 1e-30
    let strict = gkv(&["check", arg(&spec), "--suite", "courant", "--tol", "1e-30"]);
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(report(&strict)["meta"]["tolerances"]["derivative"], 1e-30);
}

#[test]
fn usage_and_spec_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gkv(&["zoo", "Z9"]).status.code(), Some(2));
    assert_eq!(gkv(&["zoo", "Z1", "--param", "alpha"]).status.code(), Some(2));
    assert_eq!(gkv(&["frobnicate"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(gkv(&["check", arg(&missing)]).status.code(), Some(2));

    let spec = emit(dir.path(), "Z1", &[]);
    assert_eq!(gkv(&["check", arg(&spec), "--suite", "everything"]).status.code(), Some(2));

    let mut bad: Value = serde_json::from_str(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    bad["metric"][0] = serde_json::json!(["1", "0", "0"]);
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad.to_string()).unwrap();
    let out = gkv(&["check", arg(&bad_path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape"));
}

#[test]
fn fourdim_on_sixteen_dimensions_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z3", &[]);
    assert_eq!(gkv(&["check", arg(&spec), "--suite", "fourdim"]).status.code(), Some(2));
}

#[test]
fn ambiguous_clustering_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z3", &["a2=1e-6"]);
    let out = gkv(&["check", arg(&spec), "--suite", "eigendist", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_worker_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z1", &[]);
    let out = Command::new(env!("CARGO_BIN_EXE_gkv"))
        .args(["check", arg(&spec), "--suite", "validate"])
        .env("GKV_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn courant_sections_report_brackets() {
    let dir = tempfile::tempdir().unwrap();
    let spec = emit(dir.path(), "Z1", &[]);
    let sections = dir.path().join("sections.json");
    let text = r#"[
        [{"vector": ["x2", "0", "0", "0"], "form": ["0", "0", "0", "0"]},
         {"vector": ["0", "x1", "0", "0"], "form": ["0", "0", "x3", "0"]}]
    ]"#;
    std::fs::write(&sections, text).unwrap();
    let path = dir.path().join("r.json");
    let out = gkv(&["courant", arg(&spec), "--sections", arg(&sections), "--report", arg(&path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let b = &r["brackets"][0];
    // [x2 e1, x1 e2] = x2 e2 - x1 e1, zero at the centre; form d(x1 x3)/2 contribution vanishes there too
    assert_eq!(b["vectorRe"], serde_json::json!([0.0, 0.0, 0.0, 0.0]));
    let membership = r["checks"].as_array().unwrap().iter().find(|c| c["checkName"] == "courant.sections[0].membership_plus").unwrap();
    assert_eq!(membership["gating"], false);
}
