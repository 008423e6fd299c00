use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn monowick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monowick"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn normalize_text() {
    let out = monowick(&["normalize", "c(1) a(3) c(3) a(2)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1·c(1)a(2) − 1·c(1)c(3)a(3)a(2)\n");
}

#[test]
fn normalize_json_matches_golden_documents() {
    for (expr, file) in [("c(3) a(3)", "number_split.json"), ("c(1) a(3) c(3) a(2)", "pi_form.json")] {
        let out = monowick(&["normalize", "--json", "--trace", expr]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), golden(file), "{expr}");
    }
}

#[test]
fn permuted_square_matches_golden_document() {
    let doc: Value = serde_json::from_str(&golden("non_positivity.json")).unwrap();
    let out = monowick(&[
        "act",
        "--json",
        "--perm",
        "(0 1)",
        "(a(0) a(0)' + c(1))' (a(0) a(0)' + c(1))",
    ]);
    assert!(out.status.success());
    let got: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(got["result"], doc["permuted"]);
    assert_eq!(got["map"], "(0 1)");
}

#[test]
fn states_and_vectors() {
    let out = monowick(&["eval", "--state", "mixed:1/2", "5*I + 3*a(4)c(4)"]);
    assert_eq!(stdout(&out), "13/2\n");
    let out = monowick(&["eval", "--state", "vacuum", "a(7) c(7)"]);
    assert_eq!(stdout(&out), "1\n");
    let out = monowick(&["apply", "--vector", "(3,7)", "c(3) a(3)"]);
    assert_eq!(stdout(&out), "1·e(3,7)\n");
    let out = monowick(&["apply", "--json", "--vector", "()", "c(-1)"]);
    assert_eq!(
        stdout(&out),
        "{\"input\":\"c(-1)\",\"vector\":[],\"result\":{\"terms\":[{\"v\":[-1],\"coeff\":\"1\"}]}}\n"
    );
}

#[test]
fn index_maps() {
    assert_eq!(stdout(&monowick(&["act", "--theta", "0", "c(0)"])), "1·c(1)\n");
    assert_eq!(stdout(&monowick(&["act", "--psi", "0", "a(0) c(0)"])), "1·a(-1)c(-1)\n");
    assert_eq!(stdout(&monowick(&["act", "--tau", "1", "c(1) a(0)"])), "1·c(2)a(1)\n");
    assert_eq!(
        stdout(&monowick(&["act", "--map", "tau:-1 theta:1 tau:1", "c(0) + c(-1)"])),
        stdout(&monowick(&["act", "--theta", "0", "c(0) + c(-1)"])),
    );
    assert_eq!(stdout(&monowick(&["act", "--perm", "(1 2)", "c(1)c(2)a(0)"])), "0\n");
}

#[test]
fn witness_command() {
    let out = monowick(&["witness", "--interval", "0", "2", "--targets", "1,3,4"]);
    assert_eq!(stdout(&out), "theta:2 theta:0\n");
    let out = monowick(&["witness", "--json", "--interval", "0", "1", "--targets", "-3,-1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["values"], serde_json::json!([-3, -1]));
}

#[test]
fn trace_lines() {
    let out = monowick(&["normalize", "--trace", "c(3) a(3)"]);
    assert_eq!(
        stdout(&out),
        "number-split       @0  c(3)a(3) -> 1·a(2)c(2) − 1·a(3)c(3)\n1·a(2)c(2) − 1·a(3)c(3)\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(monowick(&["normalize", "2/0 * I"]).status.code(), Some(1));
    assert_eq!(monowick(&["normalize", "c(1"]).status.code(), Some(1));
    assert_eq!(monowick(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(monowick(&["eval", "--state", "mixed:3/2", "I"]).status.code(), Some(2));
    assert_eq!(monowick(&["apply", "--vector", "(2,1)", "I"]).status.code(), Some(2));
    assert_eq!(
        monowick(&["witness", "--interval", "0", "1", "--targets", "4,4"]).status.code(),
        Some(2)
    );
    assert_eq!(monowick(&["witness", "--targets", "1,2"]).status.code(), Some(1));
    assert_eq!(monowick(&["check", "non-positivity"]).status.code(), Some(0));
    assert_eq!(monowick(&["check", "no-such-suite"]).status.code(), Some(1));
}

#[test]
fn parse_errors_point_at_the_offset() {
    let out = monowick(&["normalize", "c(1) + b(2)"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 7"), "{err}");
}

#[test]
fn wide_index_spread_warns() {
    let out = monowick(&["normalize", "c(0) a(2000000)"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.json");
    let out = monowick(&["normalize", "--json", "--out", path.to_str().unwrap(), "c(3) a(3)"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        written,
        "{\"input\":\"c(3) a(3)\",\"result\":{\"terms\":[{\"l1\":[2],\"l2\":[2],\"coeff\":\"1\"},{\"l1\":[3],\"l2\":[3],\"coeff\":\"-1\"}]}}\n"
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["normalize", "--json", "(c(0) + a(1))' (c(0) + a(1)) (a(2) c(2))"];
    assert_eq!(monowick(&args).stdout, monowick(&args).stdout);
}
