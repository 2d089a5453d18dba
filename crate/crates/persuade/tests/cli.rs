use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn solve_tight_example() {
    let o = persuade(&["solve", "--example", "tight-uniform", "--eps", "0.01", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    let uniform = v["constructions"]["uniform"]["ratio"].as_f64().unwrap();
    let two = v["constructions"]["two-price"]["ratio"].as_f64().unwrap();
    assert!((uniform - 1.0 / 1.99).abs() < 1e-9);
    assert!((two - 1.0).abs() < 1e-9);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn solve_reports_missing_full_surplus() {
    let o = persuade(&["solve", "--example", "b2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["full_surplus"]["holds"], Value::Bool(false));
    assert_eq!(v["full_surplus"]["witness"], serde_json::json!([0, 1]));
    assert_eq!(v["oracle"]["upper"].as_f64(), Some(7.5));
}

#[test]
fn solve_point_mass_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("point.json");
    fs::write(&path, r#"{"m": 2, "support": [[3.0, 1.5]], "prob": [1.0]}"#).unwrap();
    let o = persuade(&["solve", "--instance", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for (name, c) in v["constructions"].as_object().unwrap() {
        assert_eq!(c["ratio"].as_f64(), Some(1.0), "{name}");
    }
}

#[test]
fn malformed_instance_is_an_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"m\": 1,\n  \"support\": [[1.0]],\n  \"prob\": [1.0,]\n}\n").unwrap();
    let o = persuade(&["solve", "--instance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.json:4:"), "{err}");
}

#[test]
fn exactly_one_source() {
    let o = persuade(&["solve", "--example", "ex1", "--family", "correlated:m=2,k=3"]);
    assert_ne!(o.status.code(), Some(0));
    let o = persuade(&["solve"]);
    assert_ne!(o.status.code(), Some(0));
    let o = persuade(&["solve", "--example", "ex1", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    fs::write(&path, r#"{"m": 1, "support": [[1.0], [4.0]], "prob": [0.25, 0.75]}"#).unwrap();
    let o = persuade(&["check", "--instance", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["full_surplus"]["holds"], Value::Bool(true));
    assert_eq!(v["negatively_affiliated"]["holds"], Value::Bool(true));
    assert_eq!(v["exchangeable"], Value::Bool(true));

    let o = persuade(&["check", "--example", "b2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn reproduce_rows() {
    let o = persuade(&["reproduce", "--criterion", "1", "--criterion", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("criterion,claim,paper,relation,computed,tolerance,pass,note"));
    let pooling = text.lines().find(|l| l.contains("ex1-pooling-rev")).unwrap();
    assert!(pooling.starts_with("1,ex1-pooling-rev,5,>=,"), "{pooling}");
    assert!(pooling.contains(",true,"));

    let o = persuade(&["reproduce", "--criterion", "9"]);
    assert_eq!(o.status.code(), Some(1));
    let o = persuade(&["reproduce", "--criterion", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_table_uses_six_decimals() {
    let o = persuade(&["reproduce", "--criterion", "2"]);
    let text = stdout(&o);
    assert!(text.contains("12.250000"), "{text}");
    assert!(!text.contains("12.2500000"));
}

#[test]
fn bench_empty_sweep_is_header_only() {
    let o = persuade(&["bench", "--family", "correlated:m=2,k=3", "--count", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "seed,family,K,m,opt_wel,uniform_ratio,two_price_ratio,oracle_lower_ratio,error\n"
    );
}

#[test]
fn bench_is_deterministic_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let spec = "correlated:m=1..3,k=1..5";
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = persuade(&[
            "bench", "--family", spec, "--seed", "7", "--count", "10", "--jobs", jobs, "--format", "csv", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 10 + 2);
    assert!(lines[1].starts_with("7,correlated,"));
    assert!(lines[11].starts_with("min,correlated,"));
    assert!(lines[12].starts_with("mean,correlated,"));
}

#[test]
fn json_output_is_stable() {
    let args = ["solve", "--family", "exchangeable:m=2,k=3", "--seed", "11", "--format", "json"];
    assert_eq!(persuade(&args).stdout, persuade(&args).stdout);
}
