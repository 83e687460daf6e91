use std::process::{Command, Output};

use serde_json::Value;

fn hem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hem")).args(args).env("HEM_THREADS", "1").output().expect("hem runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = hem(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn constant(v: &Value, label: &str) -> f64 {
    v["constants"].as_array().unwrap().iter().find(|c| c["label"] == label).unwrap()["stated"].as_f64().unwrap()
}

#[test]
fn constants_examples() {
    let (code, v) = json(&["constants", "--gamma", "1", "--mu", "1", "--mu-l", "1", "--mu-r", "1", "--json"]);
    assert_eq!(code, 0);
    assert!((constant(&v, "bulk12") - 14.137).abs() < 1e-3);

    let (_, v) = json(&["constants", "--gamma", "1.6", "--json"]);
    assert_eq!(constant(&v, "bulk21"), 0.0);
    assert_eq!(constant(&v, "boundary21"), 0.0);

    let (_, v) = json(&["constants", "--mu", "0", "--mu-l", "0", "--mu-r", "0", "--json"]);
    for c in v["constants"].as_array().unwrap() {
        assert_eq!(c["stated"].as_f64().unwrap(), 0.0);
    }

    let out = hem(&["constants", "--gamma", "1.4142135623730951"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("critical γ unsupported"));
}

#[test]
fn singular_vector_examples() {
    let out = hem(&["singular-vector", "--sector", "boundary"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("2*a*(a^2+a*Q+1)*phi2"));
    let (code, v) = json(&["singular-vector", "--sector", "bulk", "--at-kac", "1,2", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["at_kac"]["zero"], true);
}

#[test]
fn gmc_smoke_is_inconclusive_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("gmc.json");
    let out = hem(&["suite", "gmc", "--samples", "100", "--grid", "512", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive (low samples)"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["status"], "inconclusive");
    assert!(dir.path().join("gmc.csv").exists());
}

#[test]
fn failing_suite_exits_one() {
    // the J1 residue closed form disagrees with the quadrature oracle
    let out = hem(&["residue", "--integral", "J1", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hem(&["residue", "--integral", "I2", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(hem(&["suite", "everything"]).status.code(), Some(2));
    assert_eq!(hem(&["constants", "--gamma", "2.5"]).status.code(), Some(2));
    assert_eq!(hem(&["--config", "/nonexistent.toml"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "command = \"gmc-fusion\"\n[params]\ngamma = 1.0\n").unwrap();
    let out = hem(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "command = \"suite\"\nsuite = \"chains\"\nseed = 3\n[params]\ngamma = 1.0\n").unwrap();
    let (code, v) = json(&["--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["suite"], "chains");
    assert_eq!(v["environment"]["seed"], 3);
}
