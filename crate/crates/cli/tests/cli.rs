use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperclass")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn check_g3_half_third() {
    let out = run(&["check", "--family", "G3", "--params", "1/2,1/3"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["nonresonant"], true);
    assert_eq!(doc["algebraic"], true);
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn check_full_report_lists_every_unit() {
    // FA(3) tuple with signature 5 at k = 1.
    let args = ["check", "--family", "FA", "--n", "3", "--params", "1/6,5/6,5/6,5/6,2/3,2/3,2/3"];
    let short = json(&run(&args));
    assert_eq!(short["algebraic"], false);
    assert_eq!(short["signatures"].as_array().unwrap().len(), 1);
    let mut full_args = args.to_vec();
    full_args.push("--full-k-report");
    let full = json(&run(&full_args));
    let sigs: Vec<u64> = full["signatures"].as_array().unwrap().iter().map(|e| e["signature"].as_u64().unwrap()).collect();
    assert_eq!(sigs.len(), 2);
    assert!(sigs.contains(&5) && sigs.contains(&7), "{sigs:?}");
}

#[test]
fn interlace_g1_floor_vectors() {
    let out = run(&["interlace", "--family", "G1"]);
    assert!(out.status.success());
    let doc = json(&out);
    let vectors: Vec<Vec<i64>> = serde_json::from_value(doc["floor_vectors"].clone()).unwrap();
    assert_eq!(vectors, vec![vec![0, 0, 1], vec![1, 1, 0]]);
}

#[test]
fn classify_fd4_is_empty() {
    let out = run(&["classify", "--family", "FD", "--n", "4", "--verify"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["solutions"]["orbits"].as_array().unwrap().len(), 0);
    assert_eq!(doc["solutions"]["families"].as_array().unwrap().len(), 0);
    assert_eq!(doc["verification"]["pass"], true);
}

#[test]
fn classify_h4_verifies_and_is_deterministic() {
    let a = run(&["classify", "--family", "H4", "--verify"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(json(&a)["verification"]["pass"], true);
    let b = run(&["classify", "--family", "H4", "--verify"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_csv_columns() {
    let out = run(&["classify", "--family", "F4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,a,b,c1,c2,orbit_size"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|r| r.starts_with("family,")).count(), 3);
    assert_eq!(rows.iter().filter(|r| r.starts_with("sporadic,")).count(), 40);
}

#[test]
fn thread_cap_gives_same_output() {
    let capped = Command::new(env!("CARGO_BIN_EXE_hyperclass"))
        .args(["classify", "--family", "F2"])
        .env("HYPERCLASS_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    assert_eq!(capped.stdout, run(&["classify", "--family", "F2"]).stdout);
}

#[test]
fn schwarz_matches_golden() {
    let out = run(&["schwarz"]);
    assert!(out.status.success());
    let golden = include_str!("golden/schwarz.csv");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    assert_eq!(golden.lines().filter(|l| l.starts_with("sporadic,")).count(), 40);
    let total: usize = golden.lines().filter(|l| l.starts_with("sporadic,")).map(|l| l.split(',').nth(4).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 408);
}

#[test]
fn families_dump() {
    let doc = json(&run(&["families", "--family", "F4"]));
    assert_eq!(doc["volume"], 4);
    assert_eq!(doc["parameters"].as_array().unwrap().len(), 4);
    assert!(!doc["nonresonance"]["non_integral"].as_array().unwrap().is_empty());
    let list = json(&run(&["families"]));
    assert!(list["families"].as_array().unwrap().len() >= 18);
}

#[test]
fn volume_of_columns() {
    let doc = json(&run(&["volume", "--generators", "1,0;1,1;1,3"]));
    assert_eq!(doc["volume"], 3);
    let doc = json(&run(&["volume", "--family", "FC", "--n", "3"]));
    assert_eq!(doc["volume"], 8);
}

#[test]
fn malformed_rational_is_usage_error() {
    let out = run(&["check", "--family", "F4", "--params", "1/4,x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["kind"], "usage");
    assert!(err["error"]["message"].as_str().unwrap().contains("parameter 2"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["check", "--family", "F9", "--params", "1/2"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--family", "F4", "--params", "1/2,1/3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify-all", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn computational_error_exits_1() {
    // Two parallel columns do not span the plane.
    let out = run(&["volume", "--generators", "1,0;2,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["error"]["message"].is_string());
}

#[test]
fn verify_single_criterion() {
    let out = run(&["verify-all", "--only", "3"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("[PASS] 3 volumes"));
}
