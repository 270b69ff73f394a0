use std::process::{Command, Output};

fn contact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contact")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

#[test]
fn exit_bound_prints_scientific() {
    let o = contact(&["bounds", "--lemma", "exit", "--a", "20", "--b", "10", "--lambda", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "9.766e-4");
}

#[test]
fn invalid_values_exit_one_with_json_error() {
    let o = contact(&["gen", "--graph", "star", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr_json(&o);
    assert!(err["error"].is_string());
    assert!(err["message"].as_str().unwrap().contains('k'));
}

#[test]
fn unknown_flag_exits_one() {
    let o = contact(&["eig", "--graph", "star", "--kk", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"experiment": "transfer", "lamda": 1}"#).unwrap();
    let o = contact(&["experiment", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("lamda"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"experiment": "star-walk", "seed": 5, "replicas": 50, "m": [10]}"#).unwrap();
    let o = contact(&["experiment", "--config", path.to_str().unwrap(), "--seed", "6", "--replicas", "70"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap().trim_start_matches("# config: ");
    let config: serde_json::Value = serde_json::from_str(header).unwrap();
    assert_eq!(config["seed"], 6);
    assert_eq!(config["replicas"], 70);
    assert_eq!(config["m"], serde_json::json!([10]));
}

#[test]
fn curve_writes_ninety_nine_points() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = contact(&["curve", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 99);
}

#[test]
fn star_eigenvalue() {
    let o = contact(&["eig", "--graph", "star", "--k", "100"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 10.0).abs() < 1e-6);
}

#[test]
fn experiment_output_ignores_thread_count() {
    let run = |threads: &str| {
        let o = contact(&["--threads", threads, "experiment", "transfer", "--seed", "3", "--replicas", "500", "--format", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("2"));
    assert_eq!(one, run("1"));
    let parsed: serde_json::Value = serde_json::from_slice(&one).unwrap();
    assert!(parsed["rows"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn simulate_records_are_reproducible() {
    let args = ["simulate", "--graph", "star", "--k", "10", "--lambda", "1", "--replicas", "20", "--seed", "8", "--horizon", "50"];
    let a = contact(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, contact(&args).stdout);
    assert_eq!(stdout(&a).lines().filter(|l| !l.starts_with('#')).count(), 21);
}
