use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn hyperex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperex")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn two_point(d: f64) -> Value {
    json!({"labels": ["a", "b"], "dist": [[0.0, d], [d, 0.0]]})
}

#[test]
fn gnk_reports_the_graph_and_metric() {
    let out = hyperex(&["gnk", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"dist\""));
}

#[test]
fn ot_reads_a_space_and_two_measures() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ot.json", &json!({"space": two_point(3.0), "mu": [1.0, 0.0], "nu": [0.5, 0.5]}));
    let out = hyperex(&["ot", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["value"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn hyper_reads_generator_lists() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "h.json",
        &json!({"space": two_point(1.0), "a": [[1.0, 0.0]], "b": [[1.0, 0.0], [0.0, 1.0]]}),
    );
    let out = hyperex(&["hyper", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn lip_reports_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "lip.json",
        &json!({"source": two_point(1.0), "target": two_point(3.0), "assignment": [0, 1]}),
    );
    let out = hyperex(&["lip", "--input", &input, "--eps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["lambda_star"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn malformed_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = json!({"space": {"labels": ["a", "b"], "dist": [[0.0, 1.0]]}, "mu": [1.0, 0.0], "nu": [0.0, 1.0]});
    let input = write(dir.path(), "bad.json", &bad);
    assert_eq!(hyperex(&["ot", "--input", &input]).status.code(), Some(2));
    assert_eq!(hyperex(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn failing_axiom_check_exits_one() {
    let out = hyperex(&["asdim", "--n", "2", "--k", "1..2", "--c", "1..3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn space_passes_its_axioms() {
    let out = hyperex(&["space", "--kind", "x-n", "--n", "2", "--k", "1", "--sample", "minimal"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["axioms"]["pass"], json!(true));
}

#[test]
fn obstruct_tabulates_lambda_min() {
    let out = hyperex(&["obstruct", "--n", "2", "--k-range", "1", "--sample", "minimal"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let row = &v["lambda_min"][0];
    assert_eq!(row["k"], json!(1));
    assert!(row["result"]["lambda_min"].as_f64().unwrap() >= 1.0 - 1e-3);
}

#[test]
fn pi_probe_flags_the_fixed_pair() {
    let out = hyperex(&["pi-probe", "--trials", "20", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["shortness_violated"], json!(true));
    assert!(v["fixed"]["ratio"].as_f64().unwrap() >= 5.0);
}

#[test]
fn suite_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        &json!({"suite": "transport", "grids": {"n": [2], "k": [1], "C": [1.0], "eps": [0.0]}, "instances": 4}),
    );
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let csv = dir.path().join("r.csv");
    for target in [&a, &b] {
        let out = hyperex(&[
            "--out",
            target.to_str().unwrap(),
            "suite",
            "--config",
            &cfg,
            "--seed",
            "5",
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);
}

#[test]
fn suite_config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &json!({"suite": "metrics", "grids": {"k": []}}));
    let out = hyperex(&["suite", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`k`"));
}
