use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> (i32, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_valdef"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    let out = child.wait_with_output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap();
    (out.status.code().unwrap(), v)
}

#[test]
fn emitted_phi_d_evaluates() {
    let (code, emitted) = run(&["emit", "phid", "--d", "0"], None);
    assert_eq!(code, 0);
    assert_eq!(emitted["schema"], "1");
    let text = serde_json::to_string(&emitted).unwrap();
    let (code, v) = run(&["eval", "--field", "Fp:5", "--sentence", "-"], Some(&text));
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], true);
}

#[test]
fn divisor_set_of_t() {
    let (code, v) = run(&["divisor", "df", "--field", "RatFunc(Fp:3,t)", "--f", "t"], None);
    assert_eq!(code, 0);
    assert_eq!(v["places"], serde_json::json!(["irr:[0,1]", "finf"]));
}

#[test]
fn hilbert_invariants() {
    let (_, v) = run(&["symbol", "hbn", "--a", "-1", "--b", "-1"], None);
    assert_eq!(v["invariants"], serde_json::json!({"2": "1", "inf": "1"}));
    assert_eq!(v["sum"], "0");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["symbol", "trivial", "--field", "Q", "--entries", "2,3,5,7"], None).0, 4);
    assert_eq!(run(&["stats", "--formula", "-"], Some("(and")).0, 2);
    assert_eq!(run(&["emit", "vald", "--d", "1"], None).0, 3);
}

#[test]
fn kato_is_deterministic() {
    let args = ["kato", "complex", "--scheme", "P1_over_Fq(3)", "--samples", "5", "--seed", "7"];
    let (code, a) = run(&args, None);
    let (_, b) = run(&args, None);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    assert_eq!(a["verdict"], "pass");
}
