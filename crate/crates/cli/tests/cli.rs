use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chenobs")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chenobs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn lie_dim_witt() {
    let out = run(&["lie-dim", "--gens", "2x0", "--weight", "3", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["report"]["dim"], 2);
}

#[test]
fn sphere_report() {
    let out = run(&["sphere", "--trunc", "4", "--json"]);
    assert!(out.status.success());
    let r = &json(&out)["report"];
    assert_eq!(r["algebra"]["der_dim"], 2);
    assert_eq!(r["algebra"]["h1_dim"], 1);
    assert_eq!(r["algebra"]["h2_dim"], 0);
    assert_eq!(r["algebra"]["h1_representative"], "x -> (2/1)*x*x");
    assert_eq!(r["algebra"]["obstruction"]["characteristic_coordinate"], "1/1");
    assert_eq!(r["integral"]["passed"], true);
}

#[test]
fn surface_genus_two() {
    let out = run(&["surface", "--genus", "2", "--json"]);
    assert!(out.status.success());
    let r = &json(&out)["report"];
    assert_eq!(r["homology_dim"], 4);
    assert_eq!(r["quotient_dim"], 4);
    assert_eq!(r["lemma"]["holds"], true);
    assert_eq!(r["equivariant"], true);
}

#[test]
fn genus_one_is_a_validation_failure() {
    let out = run(&["surface", "--genus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("genus"));
}

#[test]
fn malformed_json_reports_a_path() {
    let out = run_stdin(&["homology", "--json"], r#"{"generators": [{"name": "x", "degree": "one"}], "degree": -1}"#);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["path"], "generators[0].degree");

    let out = run_stdin(&["homology"], r#"{"generators": [{"name": "x", "degree": 1}], "degree": -1, "images": {"y": []}}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("images.y"));

    let out = run_stdin(&["homology"], "{not json");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_differential_exits_one_with_report() {
    // δx = x*x has degree 0, not -1
    let text = r#"{"generators": [{"name": "x", "degree": 1}], "degree": 1,
                   "images": {"x": [{"word": ["x", "x"], "coeff": "1"}]}}"#;
    let out = run_stdin(&["homology", "--json"], text);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["report"]["chen_check"]["degree_ok"], false);
}

#[test]
fn homology_from_stdin() {
    let text = r#"{"generators": [{"name": "x", "degree": 1}], "degree": -1}"#;
    let out = run_stdin(&["homology", "--degree", "1", "--json", "-"], text);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["total_dim"], 1);
}

#[test]
fn dictionary_commands() {
    let out = run(&["cinfty-check", &data("surface_cup.json")]);
    assert!(out.status.success());
    let out = run(&["cinfty-check", &data("bad_cup.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["check"]["violation"]["relation"], "commutativity");

    let out = run(&["delta-from-cinfty", &data("surface_cup.json"), "--json"]);
    assert!(out.status.success());
    let r = &json(&out)["report"];
    assert_eq!(r["roundtrip"], true);
    assert_eq!(r["delta"]["images"]["v"].as_array().unwrap().len(), 4);
}

#[test]
fn mc_check_and_mutant() {
    let cup: Value = serde_json::from_str(&std::fs::read_to_string(data("surface_cup.json")).unwrap()).unwrap();
    let ok = serde_json::json!({"kind": "canonical", "cinfty": cup});
    let out = run_stdin(&["mc-check", "--json"], &ok.to_string());
    assert!(out.status.success());
    let bad = serde_json::json!({"kind": "canonical", "cinfty": cup, "negate": "v"});
    let out = run_stdin(&["mc-check", "--json"], &bad.to_string());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["passed"], false);
    let unknown = serde_json::json!({"kind": "canonical", "cinfty": cup, "negate": "q"});
    assert_eq!(run_stdin(&["mc-check"], &unknown.to_string()).status.code(), Some(2));
}

#[test]
fn twisted_agrees_with_derivations() {
    for (file, n) in [("sphere_cohomology.json", "1"), ("sphere_cohomology.json", "2"), ("surface_cup.json", "1")] {
        let out = run(&["twisted-homology", "--degree", n, &data(file), "--json"]);
        assert!(out.status.success(), "{file} {n}");
        assert_eq!(json(&out)["report"]["agree"], true);
    }
}

#[test]
fn simplicial_commands() {
    let out = run(&["cohomology", &data("circle_twisted.json"), "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["dim"], 0);

    let out = run(&["obstruction", &data("sphere_obstruction.json"), "--json"]);
    assert!(out.status.success());
    let r = &json(&out)["report"];
    assert_eq!(r["class"]["is_trivial"], false);
    assert_eq!(r["characteristic"]["class"]["coords"][0], "1/1");

    let out = run(&["obstruction", &data("filtered_circle.json"), "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["level"], 1);
}

#[test]
fn bch_command() {
    let out = run(&["bch", &data("bch.json"), "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["exp_identity"], true);
}

#[test]
fn johnson_commands() {
    let out = run(&["mapping-torus", "--count", "3", "--seed", "7", "--json"]);
    assert!(out.status.success());
    let r = &json(&out)["report"];
    for inst in r["instances"].as_array().unwrap() {
        assert_eq!(inst["identity_holds"], true);
    }
    let out = run(&["tau1", "--seed", "7", "--json"]);
    assert!(out.status.success());
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["mapping-torus", "--count", "2", "--seed", "11", "--json"][..],
        &["surface", "--seed", "4"][..],
        &["sphere", "--json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}
