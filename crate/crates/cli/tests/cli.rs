use dyalg::algebra::{kappa, AlgebraElement};
use dyalg::combinatorics::DecorationMonoid;
use std::path::PathBuf;
use std::process::{Command, Output};

const T: DecorationMonoid = DecorationMonoid::Trivial;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dyalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn dyalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyalg")).args(args).output().unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn multiply_unit_by_kappa() {
    let one = scratch("one.json", &AlgebraElement::one(1, T).to_json_string());
    let k = kappa(1, 1, &T).unwrap();
    let kf = scratch("kappa.json", &k.to_json_string());
    let out = dyalg(&["multiply", path(&one), path(&kf)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = AlgebraElement::from_json_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(got, k);
}

#[test]
fn mismatched_slot_counts_exit_3() {
    let one = scratch("one2.json", &AlgebraElement::one(2, T).to_json_string());
    let kf = scratch("kappa1.json", &kappa(1, 1, &T).unwrap().to_json_string());
    assert_eq!(dyalg(&["multiply", path(&one), path(&kf)]).status.code(), Some(3));
}

#[test]
fn unknown_suite_exit_2() {
    assert_eq!(dyalg(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn malformed_input_exit_2() {
    let bad = scratch("bad.json", "{\"n\": 1}");
    assert_eq!(dyalg(&["dH", path(&bad)]).status.code(), Some(2));
}

#[test]
fn nested_sets_of_a2() {
    let out = dyalg(&["nested-sets", "--path", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn invalid_bialgebra_exit_4() {
    let b = scratch("bad-bialgebra.json", r#"{"dim":1,"bracket":[[["1"]]],"cobracket":[[["0"]]]}"#);
    let m = scratch("trivial-module.json", r#"{"dim":1,"action":[[["0"]]],"coaction":[[["0"]]]}"#);
    let e = scratch("unit1.json", &AlgebraElement::one(1, T).to_json_string());
    let out = dyalg(&["realize", path(&e), "--bialgebra", path(&b), "--module", path(&m)]);
    assert_eq!(out.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_deterministic() {
    let a = dyalg(&["coxeter-check", "--path", "2"]);
    let b = dyalg(&["coxeter-check", "--path", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
