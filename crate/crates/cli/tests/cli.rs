use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tatereps")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn verify_subset_is_reproducible() {
    let args = ["verify", "--criteria", "11,17,10", "--q", "2", "--seed", "4"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
}

#[test]
fn failing_criterion_exits_nonzero() {
    let o = run(&["verify", "--criteria", "7", "--format", "text"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL]  7"));
}

#[test]
fn config_errors() {
    let o = run(&["verify", "--p", "2", "--e", "2", "--modulus", "1,0,1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid field configuration"));
    assert!(!run(&["check", "no-such-check"]).status.success());
    assert!(!run(&["check", "rank", "--sigma", "companion:2x^2-t"]).status.success());
}

#[test]
fn single_checks_and_config_file() {
    let o = run(&["check", "taelman", "--q", "3", "--s", "3", "--cutoff", "4"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["report"]["status"], "pass");
    let o = run(&["check", "rank", "--w", "1", "--m", "0", "--sigma", "companion:x^2-t", "--cutoff", "2", "--guard", "2"]);
    assert_eq!(json(&o)["report"]["params"]["certified_rank"], 2);
    let o = run(&["amalgam", "essdim", "--rep", "tautological"]);
    assert_eq!((json(&o)["result"]["lower"].clone(), json(&o)["result"]["upper"].clone()), (1.into(), 1.into()));

    let dir = std::env::temp_dir().join(format!("tatereps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "q = 5\ncutoff = 1\n").unwrap();
    let out = dir.join("out.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "--cutoff", "2", "--out", out.to_str().unwrap(), "lfunc", "L"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((v["config"]["q"].clone(), v["config"]["cutoff"].clone()), (5.into(), 2.into()));
    std::fs::write(&cfg, "q = 5\nbogus = 1\n").unwrap();
    assert!(!run(&["--config", cfg.to_str().unwrap(), "lfunc", "L"]).status.success());
}

#[test]
fn module_commands() {
    let o = run(&["--format", "text", "carlitz", "factorial", "--i", "1", "--q", "2"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "θ^2 + θ");
    let o = run(&["rep", "check-irreducible", "--l", "3", "--q", "2"]);
    assert_eq!(json(&o)["result"]["verdict"]["verdict"], "reducible");
    let o = run(&["rep", "build", "--rep", "digits:3", "--gamma", "E12:theta", "--q", "2"]);
    assert_eq!(json(&o)["result"]["matrix"].as_array().unwrap().len(), 4);
    let o = run(&["mf", "verify", "G-eq-LE", "--cutoff", "2", "--guard", "2"]);
    assert_eq!(json(&o)["report"]["status"], "pass");
    let o = run(&["amalgam", "phi", "--gamma", "E12:theta^2", "--q", "3"]);
    assert!(o.status.success());
    let o = run(&["algrep", "check", "--sigma", "companion:x^2-t^2", "--irreducible"]);
    assert_eq!(json(&o)["result"]["irreducible"]["verdict"], "reducible");
}
