use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sva-equiv")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_reports_verdict_and_trace() {
    let out = run(&["check", "--ref", "a |-> b", "--cand", "a |-> b && c", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "IMPLIES_REF_TO_LM", "{v}");
    assert_eq!(v["forward"]["outcome"], "PASS");
    assert_eq!(v["backward"]["outcome"], "FAIL");
    assert_eq!(v["backward"]["counterexample"]["depth"], 4);
}

#[test]
fn check_syntax_error_exits_2() {
    let out = run(&["check", "--ref", "a |-> b", "--cand", "a |-> (b"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "syntax");
}

#[test]
fn check_rejects_zero_depth() {
    assert_eq!(run(&["check", "--ref", "a", "--cand", "a", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn classify_reads_arguments() {
    let out = run(&["classify", "a && b", "a |-> ##1 b", "a |-> s_eventually b"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let classes: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(classes, ["C1", "C2", "C3"]);
}

#[test]
fn wrap_writes_module_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["wrap", "u.req |-> ##1 gnt", "--id", "t1", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sv = fs::read_to_string(dir.path().join("t1.sv")).unwrap();
    assert!(sv.contains("module"));
    assert!(sv.contains("gnt"));
}

#[test]
fn eval_missing_input_is_fatal() {
    let out = run(&["eval", "--input", "/nonexistent/rows.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eval.cfg");
    fs::write(&cfg, "depth = 4\nbogus = 1\n").unwrap();
    let out = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn eval_merges_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.jsonl");
    fs::write(
        &rows,
        concat!(
            r#"{"id":"r1","reference_sva":"a |-> b","candidates":["a |-> b"]}"#,
            "\n",
            r#"{"id":"r2","reference_sva":"a |-> s_eventually b","candidates":["a |-> b"]}"#,
            "\n",
        ),
    )
    .unwrap();
    let cfg = dir.path().join("eval.cfg");
    let report = dir.path().join("report.json");
    let dump = dir.path().join("dump.csv");
    fs::write(
        &cfg,
        format!("# defaults\ninput = {}\ndepth = 3\nworkers = 2\ndenominator = all\n", rows.display()),
    )
    .unwrap();
    let out = run(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--denominator",
        "supported",
        "--report",
        report.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["denominator"], "supported");
    assert_eq!(v["rows"], 2);
    assert_eq!(v["abstentions"], 1);
    assert_eq!(v["strict_func_at_1"], 1.0);
    assert_eq!(v["all"]["strict"], 0.5);
    let csv = fs::read_to_string(&dump).unwrap();
    assert!(csv.starts_with("id,candidate,class,verdict"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn metrics_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tasks.jsonl");
    fs::write(&input, "{\"task_id\":\"a\",\"n\":4,\"c\":1}\n{\"task_id\":\"b\",\"n\":4,\"c\":4}\n").unwrap();
    let out = run(&["metrics", "--input", input.to_str().unwrap(), "--k", "1,4", "--replicates", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let rows = v["pass_at_k"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[0]["estimate"].as_f64().unwrap() - 0.625).abs() < 1e-12);
    assert_eq!(rows[1]["estimate"], 1.0);
}

#[test]
fn metrics_rejects_bad_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tasks.jsonl");
    fs::write(&input, "{\"task_id\":\"a\",\"n\":2,\"c\":3}\n").unwrap();
    assert_eq!(run(&["metrics", "--input", input.to_str().unwrap()]).status.code(), Some(1));
}
