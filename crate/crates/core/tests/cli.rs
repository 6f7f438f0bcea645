mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tetrakit::domains::Point3;
use tetrakit::tetra::OperatorTriple;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tetrakit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn point(x1: f64, x2: f64, x3: f64) -> String {
    serde_json::to_string(&Point3::real(x1, x2, x3)).unwrap()
}

fn triple(t: &OperatorTriple) -> String {
    serde_json::to_string(t).unwrap()
}

fn half() -> String {
    triple(&OperatorTriple::real_scalar(0.5, 0.5, 0.25))
}

#[test]
fn point_check_exit_codes() {
    let o = run(&["point", "check"], &point(0.0, 0.0, 0.0));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["inOpen"], true);

    let o = run(&["point", "check", "--set", "be"], &point(1.0, 1.0, 1.0));
    assert_eq!(code(&o), 0);

    let o = run(&["point", "check"], &point(2.0, 0.0, 0.0));
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["inClosed"], false);

    let o = run(&["point", "check", "--open"], &point(1.0, 1.0, 1.0));
    assert_eq!(code(&o), 1);
}

#[test]
fn scalar_fundamental_operators() {
    let o = run(&["triple", "fundamental"], &half());
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    for key in ["F1", "F2"] {
        let f = v[key]["re"][0][0].as_f64().unwrap();
        assert!((f - 0.4).abs() < 1e-12, "{key} = {f}");
    }
}

#[test]
fn diagonal_triple_is_certified() {
    let t = OperatorTriple::diagonal(&[Point3::real(0.5, 0.5, 0.25), Point3::real(0.0, 0.3, 0.0)]);
    let o = run(&["triple", "check"], &triple(&t));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "certified");
}

#[test]
fn non_commuting_input_is_an_error() {
    let input = r#"{"A":{"rows":2,"cols":2,"re":[[0,1],[0,0]],"im":[[0,0],[0,0]]},
                    "B":{"rows":2,"cols":2,"re":[[0,0],[1,0]],"im":[[0,0],[0,0]]},
                    "P":{"rows":2,"cols":2,"re":[[0,0],[0,0]],"im":[[0,0],[0,0]]}}"#;
    let o = run(&["triple", "check"], input);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn malformed_input_is_an_error() {
    assert_eq!(code(&run(&["point", "check"], "{not json")), 2);
    assert_eq!(code(&run(&["triple", "check"], r#"{"A":1}"#)), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sed": 3}"#).unwrap();
    let o = run(
        &["--config", cfg.to_str().unwrap(), "point", "check"],
        &point(0.0, 0.0, 0.0),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn dilate_build_then_verify() {
    let o = run(&["dilate", "build", "--depth", "5"], &half());
    assert_eq!(code(&o), 0);
    let model = stdout_json(&o);
    assert_eq!(model["V1"]["rows"], 6);
    assert_eq!(model["V1"]["cols"], 6);
    assert_eq!(model["conditionsOK"], true);

    let o = run(
        &["dilate", "verify", "--max-degree", "4"],
        &String::from_utf8(o.stdout).unwrap(),
    );
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["ok"], true);
    assert!(v["momentResidual"].as_f64().unwrap() < 1e-10);

    let o = run(
        &["dilate", "verify", "--max-degree", "5"],
        &triple(&OperatorTriple::zero(1)),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn dilate_build_rejects_non_commuting_fundamental_operators() {
    let o = run(&["dilate", "build"], &triple(&common::nonnormal_triple()));
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["conditionsOK"], false);
    assert!(v["commutator"].as_f64().unwrap() > 1e-2);
}

#[test]
fn dilation_suite_passes() {
    let o = run(&["suite", "--suite", "dilation", "--n", "200"], "");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(stdout_json(&o)["failed"], 0);
}

#[test]
fn suite_output_is_byte_identical_across_runs() {
    let args = ["suite", "--suite", "chain", "--n", "100", "--seed", "7"];
    let a = run(&args, "");
    let b = run(&args, "");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    run(&with_out, "");
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn sample_is_seeded() {
    let a = run(&["sample", "--count", "5", "--seed", "3"], "");
    let b = run(&["sample", "--count", "5", "--seed", "3"], "");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a).as_array().unwrap().len(), 5);
}
