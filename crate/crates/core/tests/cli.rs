//! End-to-end runs of the `sdiv` binary.

use std::path::Path;
use std::process::{Command, Output};

fn sdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdiv"))
        .args(args)
        .env_remove("SAMPLING_DIVERSITY_THREADS")
        .output()
        .unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn simulate_writes_the_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let res = sdiv(&["simulate", "--config", &data("golden.conf"), "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(data("golden.csv")).unwrap());
}

#[test]
fn json_output_parses() {
    let res = sdiv(&["simulate", "--config", &data("golden.conf"), "--format", "json"]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["curves"].as_array().unwrap().len(), 9);
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "system.users = 2\nsweep.detectors = mlsd\nsweep.snr_db = 0\nsweep.colour = blue\n").unwrap();
    assert_eq!(sdiv(&["simulate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.conf");
    assert_eq!(sdiv(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let res = Command::new(env!("CARGO_BIN_EXE_sdiv"))
        .args(["simulate", "--config", &data("golden.conf")])
        .env("SAMPLING_DIVERSITY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn validate_passes() {
    let res = sdiv(&["validate"]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn reproduce_tables() {
    for t in ["table1", "table2", "table3"] {
        let res = sdiv(&["reproduce", t]);
        assert_eq!(res.status.code(), Some(0), "{t}");
    }
    assert_eq!(sdiv(&["reproduce", "fig9"]).status.code(), Some(2));
}

#[test]
fn analyze_trace_matches_reference() {
    let res = sdiv(&["analyze", "trace", "--delays", "0,0.01,0.1,0.9", "--frame-len", "128"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let value: f64 = text.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((value / 6.7784e5 - 1.0).abs() < 1e-4, "{value}");
}

#[test]
fn analyze_optimal_delays_is_json() {
    let res = sdiv(&["analyze", "optimal-delays", "--users", "4", "--frame-len", "128"]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let taus: Vec<f64> = serde_json::from_value(v["profile"].clone()).unwrap();
    assert!((taus[1] - 0.2505).abs() < 1e-3);
}
