use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crux-subdiv")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_petersen() {
    let v = json(&cli(&["analyze", "--spec", r#"{"kind":"petersen"}"#]));
    assert_eq!(v["n"], 10);
    assert_eq!(v["d"], "3");
    assert_eq!(v["min_degree"], 3);
}

#[test]
fn crux_of_cube_at_one_half() {
    let v = json(&cli(&["crux", "--spec", r#"{"kind":"hypercube","dim":3}"#, "--alpha", "1/2", "--mode", "exact"]));
    assert_eq!(v["lower"], 4);
    assert_eq!(v["upper"], 4);
}

#[test]
fn find_then_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let out = cli(&["gen", "--spec", r#"{"kind":"gnp","n":30,"p":0.4,"seed":2}"#, "--out", graph.to_str().unwrap()]);
    assert!(out.status.success());
    let found = json(&cli(&["find-subdivision", "--graph", graph.to_str().unwrap(), "--seed", "3"]));
    let cert = dir.path().join("c.json");
    std::fs::write(&cert, found["certificate"].to_string()).unwrap();
    let ok = json(&cli(&["verify", "--graph", graph.to_str().unwrap(), "--cert", cert.to_str().unwrap()]));
    assert_eq!(ok["valid"], true);

    let mut bad = found["certificate"].clone();
    let paths = bad["paths"].as_object_mut().unwrap();
    let key = paths.keys().next().unwrap().clone();
    paths.insert(key, serde_json::json!([0, 0]));
    std::fs::write(&cert, bad.to_string()).unwrap();
    let out = cli(&["verify", "--graph", graph.to_str().unwrap(), "--cert", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cli(&["analyze"]).status.code(), Some(2));
    assert_eq!(cli(&["nonsense"]).status.code(), Some(2));
    assert_eq!(cli(&["analyze", "--spec", "{not json"]).status.code(), Some(2));
    assert_eq!(cli(&["crux", "--spec", r#"{"kind":"petersen"}"#, "--alpha", "x"]).status.code(), Some(2));
}

#[test]
fn oracle_and_greedy_methods() {
    let v = json(&cli(&["find-subdivision", "--spec", r#"{"kind":"complete_bipartite","a":3,"b":3}"#, "--method", "oracle"]));
    assert_eq!(v["t"], 4);
    let v = json(&cli(&["find-subdivision", "--spec", r#"{"kind":"complete","n":7}"#, "--method", "greedy"]));
    assert_eq!(v["t"], 7);
}

#[test]
fn pipeline_trace_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let config = dir.path().join("cfg.json");
    std::fs::write(&config, r#"{"eps":0.02,"target_t":3}"#).unwrap();
    let v = json(&cli(&[
        "find-subdivision",
        "--spec",
        r#"{"kind":"petersen"}"#,
        "--config",
        config.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]));
    assert!(v["t"].as_u64().unwrap() >= 3);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()));
}

#[test]
fn profile_and_gadget_and_extract() {
    let v = json(&cli(&["profile", "--spec", r#"{"kind":"cycle","n":8}"#, "--delta", "0.5", "--mode", "exact"]));
    assert_eq!(v["max_size"], 4);
    let v = json(&cli(&["gadget", "--spec", r#"{"kind":"complete","n":4}"#, "--k", "3"]));
    assert_eq!(v["clique_number"], 4);
    let v = json(&cli(&["extract-expander", "--spec", r#"{"kind":"complete","n":8}"#, "--mode", "exact"]));
    assert_eq!(v["n"], 8);
}

#[test]
fn experiments_are_reproducible_and_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let args = ["experiment", "dichotomy", "--n", "40", "--p", "0.1,0.5", "--trials", "2", "--seed", "9"];
    let a = cli(&[&args[..], &["--csv", csv.to_str().unwrap()]].concat());
    let b = cli(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("trial,seed,"));
    assert_eq!(text.lines().count(), 5);
    let jung = json(&cli(&["experiment", "jung", "--a", "3", "--copies", "4"]));
    assert_eq!(jung["summary"]["equal"], true);
    let obs = json(&cli(&["experiment", "obstruction", "--t", "4"]));
    assert_eq!(obs["experiment"], "bipartite_obstruction");
}
