//! End-to-end checks of the command-line surface.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pack3d")
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn gen_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let pack = dir.path().join("pack.json");
    let report = dir.path().join("report.json");

    let out = run(&[
        "gen", "--family", "cube-heavy", "--n", "7", "--seed", "11",
        "--output", inst.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    for algo in ["volume", "licheng", "absolute", "rotation"] {
        let out = run(&[
            "solve", "--algo", algo,
            "--input", inst.to_str().unwrap(),
            "--output", pack.to_str().unwrap(),
            "--report", report.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{algo} failed: {out:?}");
        let report_text = std::fs::read_to_string(&report).unwrap();
        let value: serde_json::Value = serde_json::from_str(&report_text).unwrap();
        assert_eq!(value["feasible"], serde_json::json!(true));

        // Every emitted packing re-verifies through the CLI.
        let out = run(&[
            "verify", "--input", inst.to_str().unwrap(),
            "--packing", pack.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "verify of {algo} output failed");
    }
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    write(&bad, "{not json");
    let out = run(&["solve", "--algo", "volume", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_algo_fails() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    write(
        &inst,
        r#"{"items": [{"id":"a","w":"0.5","d":"0.5","h":"0.5"}]}"#,
    );
    let out = run(&["solve", "--algo", "nope", "--input", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_verification_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let pack = dir.path().join("pack.json");
    write(
        &inst,
        r#"{"items": [{"id":"a","w":"0.6","d":"0.5","h":"0.5"}]}"#,
    );
    // x span [0.5, 1.1] is outside the unit bin.
    write(
        &pack,
        r#"{"kind":"bins","placements":[{"id":"a","bin":0,"x":"0.5","y":"0","z":"0","orient":"xyz"}]}"#,
    );
    let out = run(&[
        "verify", "--input", inst.to_str().unwrap(),
        "--packing", pack.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_is_deterministic_and_counts_rows() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "bench", "--families", "uniform", "--count", "4", "--seed", "5",
            "--algos", "volume,licheng,rotation",
            "--output", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let text_a = std::fs::read_to_string(&a).unwrap();
    let text_b = std::fs::read_to_string(&b).unwrap();
    assert_eq!(text_a, text_b, "same seed must give byte-identical CSV");
    // 4 instances x 3 algorithms + header.
    assert_eq!(text_a.lines().count(), 13);
    // Oracle populated only for small instances (all are, at count 4 max 8
    // items with default cap 6 some may be blank); header intact.
    assert!(text_a.starts_with("instance,algo,result,volume_lb,oracle_opt,ratio,runtime_ms"));
}

#[test]
fn external_backend_round_trips_through_subprocess() {
    // A trivial external backend: stack items along z with a tiny python
    // helper. Exercises the subprocess protocol end to end.
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    write(
        &inst,
        r#"{"items": [
            {"id":"a","w":"0.5","d":"0.5","h":"0.25"},
            {"id":"b","w":"0.5","d":"0.5","h":"0.5"}
        ]}"#,
    );
    let helper = dir.path().join("stack.py");
    write(
        &helper,
        r#"
import json, sys
from fractions import Fraction
inst = json.load(sys.stdin)
z = Fraction(0)
placements = []
for item in inst["items"]:
    placements.append({"id": item["id"], "bin": 0, "x": "0", "y": "0", "z": str(z), "orient": "xyz"})
    z += Fraction(item["h"])
print(json.dumps({"kind": "strip", "strip_axis": "z", "placements": placements}))
"#,
    );
    let out = run(&[
        "solve", "--algo", "absolute-sp",
        "--input", inst.to_str().unwrap(),
        "--backend", "external",
        "--backend-cmd", &format!("python3 {}", helper.to_str().unwrap()),
    ]);
    assert!(
        out.status.success(),
        "external backend failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}
