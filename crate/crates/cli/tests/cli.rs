use std::io::Write;
use std::process::{Command, Output};

use theta_forge::thetanum::ThetaContext;
use theta_forge_cli::dsl::Value;
use theta_forge_cli::parse_value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-forge")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_ms(s: &str) -> Vec<serde_json::Value> {
    s.lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("ms");
            v
        })
        .collect()
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn verify_single_identity() {
    let o = bin(&["verify", "--id", "rr", "--trials", "10", "--seed", "42", "--tol", "1e-9", "--mode", "numeric"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports = without_ms(&stdout(&o));
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["id"], "rr");
    assert_eq!(reports[0]["pass"], true);
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let cfg = config(
        r#"{"seed": 7, "trials": 6, "identities": [
            {"id": "thmrn", "params": {"n": 3}},
            {"id": "kn", "params": {"n": 3}, "mode": "numeric"},
            {"id": "cornew", "params": {"m": [1, 1]}}
        ]}"#,
    );
    let path = cfg.path().to_str().unwrap();
    let a = bin(&["verify", "--config", path]);
    let b = bin(&["verify", "--config", path]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(without_ms(&stdout(&a)), without_ms(&stdout(&b)));
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .map(|l| l.split(",\"ms\":").next().unwrap().to_string())
            .collect()
    };
    assert_eq!(strip(stdout(&a)), strip(stdout(&b)));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&bin(&["verify", "--id", "rr", "--tol", "0", "--mode", "numeric", "--trials", "2"])), 1);
    assert_eq!(code(&bin(&["verify", "--id", "nope"])), 2);
    assert_eq!(code(&bin(&["verify", "--id", "rr", "--param", "n=2"])), 2);
    assert_eq!(code(&bin(&["verify"])), 2);
    assert_eq!(code(&bin(&["frobnicate"])), 2);
    let bad = config("{ not json");
    assert_eq!(code(&bin(&["verify", "--config", bad.path().to_str().unwrap()])), 2);
    assert_eq!(code(&bin(&["eval", "--expr", "theta("])), 2);
    assert_eq!(code(&bin(&["eval", "--expr", "theta(x)"])), 2);
    assert_eq!(code(&bin(&["eval", "--expr", "1/(1 - x)", "--bind", "x=1"])), 3);
    let empty = config("{}");
    let o = bin(&["verify", "--config", empty.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
}

#[test]
fn eval_prints_a_value() {
    let o = bin(&["eval", "--expr", "sumsubsets(I,2,1, prod(i in I, x_i))", "--bind", "x=[2, 3]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "5");
    let o = bin(&["eval", "--expr", "theta(x) + x*theta(1/x)", "--bind", "x=2+1i", "--nome", "0.3"]);
    assert_eq!(code(&o), 0);
    let printed = stdout(&o);
    match parse_value(printed.trim(), ThetaContext::trivial()).unwrap() {
        Value::Scalar(z) => assert!(z.norm() < 1e-12, "{printed}"),
        other => panic!("{other:?}"),
    }
    let e = bin(&["eval", "--expr", "theta(x) +\n  foo(x)", "--bind", "x=2"]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("2:3"));
}

#[test]
fn list_identities_names_every_id() {
    let o = bin(&["list-identities"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for id in ["thmrn", "ww", "gu", "kn", "rr", "nis1", "thmr", "vm", "cordmsum", "kawanaka", "hall-littlewood"] {
        assert!(out.lines().any(|l| l.starts_with(id)), "{id}");
    }
}
