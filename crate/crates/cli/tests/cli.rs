use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn heatgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatgen"))
        .args(args)
        .env_remove("HEATGEN_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn coeffs_json_for_s2() {
    let out = heatgen(&["coeffs", "S2", "--order", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["space"], "S2");
    assert_eq!(v["order"], 2);
    assert_eq!(v["a"], serde_json::json!(["1", "1/3", "1/15"]));
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    assert!(v["timing_ms"].is_null());
}

#[test]
fn coeffs_text_for_flat_space() {
    let out = heatgen(&["coeffs", "flat3", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let a: Vec<&str> = text
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(a, ["1", "0", "0", "0", "0", "0"]);
}

#[test]
fn validate_s3_passes() {
    let out = heatgen(&["validate", "S3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let checks = json(&out)["checks"].as_array().unwrap().clone();
    assert!(checks.len() >= 6);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn validate_rejects_anisotropic_file() {
    // so(3) generators with beta = diag(1, 2, 3)
    let doc = r#"{
        "schema_version": 1, "name": "aniso", "n": 3, "p": 3,
        "g": [["1","0","0"],["0","1","0"],["0","0","1"]],
        "beta": [["1","0","0"],["0","2","0"],["0","0","3"]],
        "E": [
            [["0","1","0"],["-1","0","0"],["0","0","0"]],
            [["0","0","1"],["0","0","0"],["-1","0","0"]],
            [["0","0","0"],["0","0","1"],["0","-1","0"]]
        ]
    }"#;
    let path = scratch_file("aniso.json", doc);
    let out = heatgen(&["validate", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"curvature_invariance"), "{failed:?}");

    let out = heatgen(&["coeffs", path.to_str().unwrap(), "--order", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn space_file_matches_builtin() {
    let doc = r#"{
        "schema_version": 1, "name": "two-sphere", "n": 2, "p": 1,
        "g": [["1","0"],["0","1"]],
        "beta": [["1"]],
        "E": [[["0","1"],["-1","0"]]]
    }"#;
    let path = scratch_file("s2.json", doc);
    let from_file = json(&heatgen(&[
        "coeffs",
        path.to_str().unwrap(),
        "--order",
        "4",
        "--json",
    ]));
    let builtin = json(&heatgen(&["coeffs", "S2", "--order", "4", "--json"]));
    assert_eq!(from_file["a"], builtin["a"]);
    assert_eq!(from_file["space"], "two-sphere");
}

#[test]
fn malformed_file_is_a_usage_error() {
    let path = scratch_file("bad.json", r#"{"schema_version": 1, "name": "x", "n": 2}"#);
    let out = heatgen(&["coeffs", path.to_str().unwrap(), "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["coeffs", "S2"],
        vec!["coeffs", "S9", "--order", "2"],
        vec!["eval", "S2", "--t", "-1"],
        vec!["eval", "S2", "--t", "0.1", "--method", "magic"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = heatgen(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(heatgen(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_heatgen"))
        .args(["coeffs", "S3", "--order", "2"])
        .env("HEATGEN_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget of 50"));
    // the flag wins over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_heatgen"))
        .args(["coeffs", "S3", "--order", "2", "--budget", "1000"])
        .env("HEATGEN_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "eval",
        "S2xS2",
        "--t",
        "0.1",
        "--method",
        "mc",
        "--samples",
        "20000",
        "--seed",
        "17",
        "--json",
    ];
    let a = heatgen(&args);
    let b = heatgen(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = heatgen(&[
        "eval",
        "S2xS2",
        "--t",
        "0.1",
        "--method",
        "mc",
        "--samples",
        "20000",
        "--seed",
        "18",
        "--json",
    ]);
    assert_ne!(a.stdout, c.stdout);

    let args = ["compare", "S2", "--order", "4", "--t", "0.05,0.1", "--json"];
    assert_eq!(heatgen(&args).stdout, heatgen(&args).stdout);
}

#[test]
fn eval_prints_seventeen_significant_digits() {
    let v = json(&heatgen(&[
        "eval", "S3", "--t", "0.1", "--order", "6", "--json",
    ]));
    let value = v["numeric"]["value"].as_str().unwrap();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
    let x: f64 = value.parse().unwrap();
    assert!((x - 0.1f64.exp()).abs() < 1e-8);
}

#[test]
fn compare_runs_all_checks() {
    let out = heatgen(&["compare", "S2", "--order", "4", "--t", "0.05,0.1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for want in [
        "a1_vs_curvature",
        "a2_vs_curvature",
        "det_factorization",
        "numeric_average(t=0.1)",
        "spectral(t=0.05)",
    ] {
        assert!(names.contains(&want), "missing {want} in {names:?}");
    }
}

#[test]
fn compare_over_budget_fails_checks() {
    let out = heatgen(&["compare", "S6", "--order", "4", "--t", "0.05"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_lists_builtins() {
    let out = heatgen(&["catalog", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["S2", "S3", "S4", "S5", "S6", "S2xS2", "S2xS3", "flat(n)"]
    );
    assert_eq!(v[2]["scalar_curvature"], "12");
}
