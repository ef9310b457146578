use std::process::{Command, Output};

use serde_json::Value;

fn orbitmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitmat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_collatz_with_oracle() {
    let out = orbitmat(&["analyze", "--fn", "collatz", "--n", "50", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degree_m"], 18);
    assert_eq!(v["inverse_nnz"], 348);
    assert_eq!(v["det"], 1);
    assert_eq!(v["has_cycle"], false);
    assert_eq!(
        v["partition_pi"],
        serde_json::json!([10, 4, 3, 3, 3, 3, 4, 2, 2, 2, 2, 2, 3, 2, 2, 1, 1, 1])
    );
}

#[test]
fn analyze_cycle_exits_three() {
    let out = orbitmat(&["analyze", "--fn", "table:1>2,2>1", "--n", "2", "--verify"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["has_cycle"], true);
    assert_eq!(v["cycle_elements"], serde_json::json!([2, 1]));
    assert_eq!(v["det"], 0);
    assert!(v.get("partition_pi").is_none());
}

#[test]
fn analyze_shift_count_only() {
    let out = orbitmat(&[
        "analyze",
        "--fn",
        "shift:t=1",
        "--n",
        "50",
        "--no-materialize-inverse",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["inverse_nnz"], 1275);
    assert_eq!(v["degree_m"], 50);
    assert!(v.get("det").is_none());
}

#[test]
fn writes_report_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let ihat = dir.path().join("ihat.svg");
    let inv = dir.path().join("inv.svg");
    let args = [
        "analyze",
        "--fn",
        "collatz",
        "--n",
        "50",
        "--json",
        report.to_str().unwrap(),
        "--svg-ihat",
        ihat.to_str().unwrap(),
        "--svg-inv",
        inv.to_str().unwrap(),
    ];
    assert_eq!(orbitmat(&args).status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved["inverse_nnz"], 348);
    let first_ihat = std::fs::read(&ihat).unwrap();
    let inv_svg = std::fs::read_to_string(&inv).unwrap();
    assert_eq!(inv_svg.matches("#d62728").count(), 348);
    assert!(!inv_svg.contains("#1f77b4"));

    assert_eq!(orbitmat(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&ihat).unwrap(), first_ihat);
}

#[test]
fn scan_subcommand() {
    let out = orbitmat(&[
        "scan",
        "--fn",
        "rcwa:mod=2;0:1,0;1:3,-1;cut=2",
        "--n-min",
        "2",
        "--n-max",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["first"], 10);
    assert_eq!(v["monotone"], true);

    let out = orbitmat(&[
        "scan", "--fn", "collatz", "--n-min", "2", "--n-max", "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["first"], Value::Null);

    let out = orbitmat(&[
        "scan",
        "--fn",
        "table:1>2,2>1",
        "--n-min",
        "2",
        "--n-max",
        "5",
    ]);
    assert_eq!(json(&out)["first"], 2);
}

#[test]
fn oracle_subcommand() {
    let out = orbitmat(&[
        "oracle",
        "--fn",
        "rcwa:mod=3;0:1,0;1:2,1;2:5,-1;cut=1",
        "--n",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["det"], 1);
    assert_eq!(v["inverse_verified"], true);

    let out = orbitmat(&["oracle", "--fn", "table:1>2,2>1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["det"], 0);

    let out = orbitmat(&["oracle", "--fn", "collatz", "--n", "513"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_exit_codes() {
    let out = orbitmat(&[
        "analyze",
        "--fn",
        "rcwa:mod=2;0:1,0;1:2,1;cut=0",
        "--n",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not integral"));

    assert_eq!(
        orbitmat(&["analyze", "--fn", "collatz"]).status.code(),
        Some(1)
    );
    assert_eq!(orbitmat(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(orbitmat(&["--help"]).status.code(), Some(0));

    let out = orbitmat(&[
        "analyze",
        "--fn",
        "shift:t=1",
        "--n",
        "5000",
        "--svg-ihat",
        "/dev/null",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
