use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(name).display().to_string()
}

fn ratekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratekit"))
        .args(args)
        .env("RATEKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = ratekit(&full);
    let doc = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), doc)
}

#[test]
fn strict_verdict_on_ex_nts_names_the_face() {
    let (code, doc) = json(&["check", "strict", &fixture("ex-nts.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["schema"], "ratekit-report/1");
    let r = &doc["results"];
    assert_eq!(r["strictly_convex"], false);
    assert_eq!(r["cond_projection"], false);
    assert_eq!(r["witness"]["face"], "{0}×[0,∞)");
    assert_eq!(r["witness"]["hyperplane"], "v1 = 0");
}

#[test]
fn strict_verdict_on_square() {
    let (code, doc) = json(&["check", "strict", &fixture("square.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["strictly_convex"], true);
    assert!(doc["results"]["witness"].is_null());
}

#[test]
fn decompose_refuses_without_projection_property() {
    let out = ratekit(&["decompose", &fixture("ex-nts.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("projection property fails"), "{err}");
}

#[test]
fn decompose_square_has_nine_cells() {
    let (code, doc) = json(&["decompose", &fixture("square.json")]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["cells"].as_array().unwrap().len(), 9);
}

#[test]
fn rate_is_tagged_and_round_trips() {
    let (code, doc) = json(&["rate", &fixture("bernoulli.json"), "--at", "0.7"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["point"][0]["exact"], "7/10");
    let v: f64 = doc["results"]["value"]["float"].to_string().parse().unwrap();
    let want = 0.7f64 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
    assert!((v - want).abs() < 1e-8, "{v} vs {want}");
    assert_eq!(doc["results"]["value"]["tol"], 1e-8);
}

#[test]
fn outside_support_is_plus_infinity() {
    let (code, doc) = json(&["rate", &fixture("ex-nts.json"), "--at", "-1", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["value"]["float"], "+inf");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["--format", "json", "verify", "cramer", &fixture("bernoulli.json"), "--region", "0.7..", "--n", "20", "--trials", "5000"];
    let a = ratekit(&args);
    let b = ratekit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn eq12_fails_on_ex_nts_far_up_the_axis() {
    let (code, doc) = json(&["verify", "eq12", &fixture("ex-nts.json"), "--hyperplane", "1,0=0", "--at", "0,3", "0,5"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["holds"], false);
}

#[test]
fn text_format_is_a_table() {
    let out = ratekit(&["faces", &fixture("square.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("results.facets[0].mass") && l.ends_with("1/2")));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(ratekit(&["domain", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(ratekit(&["rate", &fixture("square.json"), "--at", "1"]).status.code(), Some(2));
    assert_eq!(ratekit(&["rate", &fixture("square.json"), "--at", "x", "1"]).status.code(), Some(2));
    assert_eq!(ratekit(&["frobnicate"]).status.code(), Some(2));
    let (code, doc) = json(&["verify", "eq12", &fixture("square.json"), "--hyperplane", "1,0"]);
    assert_eq!(code, 2);
    assert_eq!(doc["status"], "error");
}

#[test]
fn malformed_spec_exits_two() {
    let dir = std::env::temp_dir().join(format!("ratekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.json");
    std::fs::write(&p, r#"{"dimension": 1, "components": [{"weight": "1/3", "shift": ["0/1"], "laws": [{"kind": "atom", "at": "0/1"}]}]}"#).unwrap();
    assert_eq!(ratekit(&["domain", p.to_str().unwrap()]).status.code(), Some(2));
}
