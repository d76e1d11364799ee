// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fermicon"));
    cmd.env_remove("FERMICON_MAX_DIM");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn json_report(args: &[&str], dir: &Path, file: &str) -> (i32, Value) {
    let path = dir.join(file);
    let mut all = vec!["--json", path.to_str().unwrap()];
    all.extend_from_slice(args);
    let out = run(&all);
    let body = std::fs::read_to_string(&path).expect("report written");
    (code(&out), serde_json::from_str(&body).unwrap())
}

#[test]
fn verify_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = json_report(&["verify", "all"], dir.path(), "all.json");
    assert_eq!(code, 0);
    assert_eq!(report["summary"]["failed"], 0);
    let total = report["summary"]["total"].as_u64().unwrap();
    assert_eq!(total as usize, report["checks"].as_array().unwrap().len());
    assert!(total > 40);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(code(&run(&["verify", "bogus"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn first_class_suite_covers_both_examples() {
    let out = run(&["verify", "first-class"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("first-class/eq39 [operator vs closed-form]"), "{text}");
    assert!(text.contains("first-class/sec42 [operator vs closed-form]"), "{text}");
}

#[test]
fn failing_tolerance_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    std::fs::write(&cfg, r#"{"tolerances": {"trotter_slope": 0.0}}"#).unwrap();
    let (code, report) = json_report(
        &["--config", cfg.to_str().unwrap(), "verify", "lattice"],
        dir.path(),
        "r.json",
    );
    assert_eq!(code, 1);
    assert_eq!(report["summary"]["failed"], 1);
    let failed: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert_eq!(failed[0]["name"], "lattice/trotter-slope");
}

fn keys(v: &Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

#[test]
fn report_schema_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (_, report) = json_report(&["verify", "grassmann"], dir.path(), "g.json");
    assert_eq!(
        keys(&report),
        ["checks", "config_hash", "seed", "suite", "summary", "version"]
    );
    assert_eq!(keys(&report["summary"]), ["failed", "passed", "total"]);
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(
            keys(check),
            [
                "error",
                "max_deviation",
                "name",
                "pass",
                "routes",
                "tolerance",
                "wall_time_ms"
            ]
        );
        assert_eq!(check["routes"].as_array().unwrap().len(), 2);
    }
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(report["suite"], "grassmann");
}

fn without_timing(mut v: Value) -> Value {
    for check in v["checks"].as_array_mut().unwrap() {
        check.as_object_mut().unwrap().remove("wall_time_ms");
    }
    v
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("number-constraint.json");
    let args = ["--seed", "17", "--config", cfg.to_str().unwrap(), "verify", "all"];
    let (_, a) = json_report(&args, dir.path(), "a.json");
    let (_, b) = json_report(&args, dir.path(), "b.json");
    assert_eq!(a["seed"], 17);
    assert_eq!(without_timing(a.clone()), without_timing(b));
    let (_, other) = json_report(&["--seed", "17", "verify", "all"], dir.path(), "c.json");
    assert_ne!(a["config_hash"], other["config_hash"]);
}

#[test]
fn kernel_routes_agree() {
    let out = run(&["kernel", "eq39", "--route", "operator", "--compare", "closed-form"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("max deviation 0.000e0"), "{}", stdout(&out));

    let out = run(&[
        "kernel",
        "bose-fermi",
        "--p",
        "1",
        "--t",
        "0.3",
        "--route",
        "lattice",
        "--compare",
        "quadrature",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS lattice vs quadrature"));
}

#[test]
fn kernel_at_zero_time_is_the_static_form() {
    let dir = tempfile::tempdir().unwrap();
    let (c0, at_zero) = json_report(&["kernel", "eq58", "--t", "0"], dir.path(), "k0.json");
    let (c1, later) = json_report(&["kernel", "eq58", "--t", "0.7"], dir.path(), "k1.json");
    assert_eq!((c0, c1), (0, 0));
    let text = at_zero["kernel"].as_str().unwrap();
    assert!(text.starts_with("(+1.0+0.0i) + "), "{text}");
    assert_ne!(at_zero["kernel"], later["kernel"]);
    assert_eq!(at_zero["params"]["t"], 0.0);
}

#[test]
fn kernel_reads_labels_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.json");
    std::fs::write(&labels, r#"{"z_bra": [[0.1, 0.2]], "z_ket": [[0.3, -0.4]]}"#).unwrap();
    let (c, out) = json_report(
        &[
            "kernel",
            "bose-fermi",
            "--labels",
            labels.to_str().unwrap(),
            "--route",
            "quadrature",
            "--compare",
            "closed-form",
        ],
        dir.path(),
        "k.json",
    );
    assert_eq!(c, 0);
    assert_eq!(out["params"]["z_ket"][0][1], -0.4);
    assert_eq!(out["compare"]["pass"], true);

    let cfg = config("number-constraint.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "kernel",
        "eq39",
        "--route",
        "lattice",
        "--compare",
        "operator",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "kernel",
        "eq39",
        "--route",
        "lattice",
        "--n-slices",
        "3",
    ]);
    assert_eq!(code(&out), 2, "multiplier count must match the slice count");
}

#[test]
fn kernel_usage_errors() {
    assert_eq!(code(&run(&["kernel", "eq99"])), 2);
    assert_eq!(code(&run(&["kernel", "eq39", "--route", "sideways"])), 2);
    assert_eq!(
        code(&run(&["kernel", "eq58", "--route", "lattice", "--n-slices", "0"])),
        2
    );
}

#[test]
fn dimension_cap_comes_from_the_environment() {
    let out = bin()
        .env("FERMICON_MAX_DIM", "4")
        .args(["kernel", "bose-fermi"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap 4"));
}

#[test]
fn classify_verdicts() {
    let out = run(&["classify", config("three-fermion.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("Φ (even): first-class") && text.contains("χ (odd): first-class"),
        "{text}"
    );
    assert!(text.contains("{χ, χ†} = i[(+0.000000-1.000000i)·Φ]"), "{text}");

    for name in ["shifted-odd.json", "odd-pair-set.json"] {
        let out = run(&["classify", config(name).to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert!(!stdout(&out).contains("first-class"), "{name}: {}", stdout(&out));
        assert!(stdout(&out).contains("second-class"));
    }
}

#[test]
fn classify_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"space": {"n_fermions": 1}, "constraints": []}"#).unwrap();
    assert_eq!(code(&run(&["classify", empty.to_str().unwrap()])), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"space\": {\"n_fermions\": 1},\n  \"constraints\": [{\"name\": \"x\", \"parity\": \"weird\"}]\n}",
    )
    .unwrap();
    let out = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("constraints[0].parity") && err.contains("line 3"), "{err}");

    assert_eq!(code(&run(&["classify", "/nonexistent/config.json"])), 2);
}
