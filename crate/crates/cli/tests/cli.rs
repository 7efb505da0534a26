use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualhankel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("dualhankel-{}-{name}", std::process::id()))
}

#[test]
fn verify_default_passes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["report"]["passed"], Value::Bool(true));
    let names: Vec<&str> = v["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"hille_hardy"));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["params"]["alpha"], 0.0);
}

#[test]
fn domain_violation_exits_2() {
    let out = run(&["verify", "--alpha", "-1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    let out = run(&["spectrum", "--eta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_rejected() {
    assert_eq!(run(&["verify", "--gamma", "1"]).status.code(), Some(2));
}

#[test]
fn tight_tolerance_names_failing_check() {
    let out = run(&["verify", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("check failed: eigen_relation"), "{err}");
    assert_eq!(json(&out)["report"]["passed"], Value::Bool(false));
}

#[test]
fn nullspace_reports() {
    let v = json(&run(&["nullspace", "--y", "0"]));
    let e = &v["report"]["entries"][0];
    assert_eq!(e["dim_ker"], 0);
    assert_eq!(e["null_indices"].as_array().unwrap().len(), 0);

    let v = json(&run(&["nullspace", "--zeros-of", "3"]));
    let entries = v["report"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        assert!(e["null_indices"].as_array().unwrap().contains(&Value::from(3)));
    }

    let v = json(&run(&["nullspace", "--scan", "200", "--seed", "7"]));
    assert_eq!(v["report"]["entries"].as_array().unwrap().len(), 200);
    assert_eq!(v["report"]["nonempty"], 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["spectrum", "--trunc", "200", "--y", "1.3", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["nullspace", "--scan", "20", "--seed", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn spectrum_csv() {
    let out = run(&["spectrum", "--trunc", "50", "--format", "csv", "--y", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,s_n,c_n"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    // alpha = 0, beta = eta = 1, y = 0: s_0 = sqrt(pi)
    let s0: f64 = first[1].parse().unwrap();
    assert!((s0 - std::f64::consts::PI.sqrt()).abs() < 1e-15);
    assert_eq!(first[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = temp("cfg.txt");
    std::fs::write(&cfg, "alpha = 1.5\nbeta = 2\ny = 3\nformat = json\n").unwrap();
    let out = run(&["nullspace", "--config", cfg.to_str().unwrap(), "--y", "0.25"]);
    let bad = temp("bad.txt");
    std::fs::write(&bad, "colour = red\n").unwrap();
    let rejected = run(&["nullspace", "--config", bad.to_str().unwrap()]);
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&bad).ok();
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["params"]["alpha"], 1.5);
    assert_eq!(v["params"]["beta"], 2.0);
    assert_eq!(v["params"]["y"], 0.25);
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let path = temp("rule.csv");
    let out = run(&["quadrature", "--family", "jacobi", "--trunc", "5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 6);
    let w: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    // int_0^1 dt with beta = eta = 1
    assert!((w - 1.0).abs() < 1e-14);
}

#[test]
fn kernel_and_transform() {
    let v = json(&run(&["kernel", "--q", "0.3,0,0.4,0", "--x", "2", "--y", "5", "--alpha", "1"]));
    assert!(v["report"]["abs_diff"].as_f64().unwrap() < 1e-9);
    let out = run(&["transform", "--coeffs", "1;0,0.5,0,0;0.25", "--y", "0.7", "--q", "0.2,0.1,0,0;0,0,0,0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    for p in v["report"]["points"].as_array().unwrap() {
        assert!(p["abs_diff"].as_f64().unwrap() < 1e-10);
    }
    assert_eq!(run(&["kernel", "--q", "0.9,0.9,0,0"]).status.code(), Some(1));
}
