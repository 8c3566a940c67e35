use std::process::Command;

use qforge::pipeline::{self, Input, PipelineConfig, Stage};
use serde_json::Value;

fn qforge(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qforge")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn full_run_on_d5() {
    let (code, out) = qforge(&["all", "--case", "d5-to-e6"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "qforge/1");
    assert_eq!(v["stages"]["normalize"]["lambda_text"], "q^(-3/4)");
    assert_eq!(v["stages"]["extend"]["cases"][0]["target"], "E6");
    assert_eq!(v["conventions"]["coproduct"], "Opposite");
    assert!(v["inputs"]["rep"]["sha256"].as_str().unwrap().len() == 64);
    assert_eq!(v["literature_agrees"], false);
}

#[test]
fn all_nine_extensions() {
    let (code, out) = qforge(&["extend", "--case", "all-nine"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let cases = v["stages"]["extend"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 9);
    let targets: Vec<&str> = cases.iter().map(|c| c["target"].as_str().unwrap()).collect();
    assert_eq!(targets, ["A5", "B4", "C4", "D6", "E6", "E7", "E8", "F4", "G2"]);
}

#[test]
fn minpoly_from_rep_name() {
    let (code, out) = qforge(&["minpoly", "--rep", "reps/e7_fund56.json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["stages"]["minpoly"]["degree"], 4);
    assert!(v["stages"].get("normalize").is_none());
}

#[test]
fn text_output_to_file() {
    let path = std::env::temp_dir().join(format!("qforge-cli-{}.txt", std::process::id()));
    let (code, out) = qforge(&["validate", "--rep", "e6_fund27", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.contains("PASS validate.minuscule"));
    assert!(text.contains("warning: node"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(qforge(&["all", "--case", "no-such-case"]).0, 2);
    assert_eq!(qforge(&["rmatrix", "--case", "all-nine"]).0, 2);
    assert_eq!(qforge(&["rmatrix", "--case", "b3-to-f4"]).0, 2);
    assert_eq!(qforge(&["rmatrix", "--rep", "d5_halfspin16", "--check", "sampled:0"]).0, 2);
    assert_eq!(qforge(&["rmatrix", "--rep", "d5_halfspin16", "--eigen", "1/0"]).0, 2);
    assert_eq!(qforge(&["validate"]).0, 2);
    let bad = std::env::temp_dir().join(format!("qforge-bad-{}.json", std::process::id()));
    std::fs::write(&bad, "{\"name\": 3}").unwrap();
    assert_eq!(qforge(&["validate", "--rep", bad.to_str().unwrap()]).0, 2);
    std::fs::remove_file(&bad).unwrap();
}

#[test]
fn reports_are_deterministic() {
    let cfg = PipelineConfig::new(Input::Case("e6-to-e7".into()), Stage::All);
    let a = pipeline::run(&cfg).unwrap();
    let b = pipeline::run(&cfg).unwrap();
    assert_eq!(pipeline::canonical(&a.value), pipeline::canonical(&b.value));
    assert!(pipeline::diff_reports(&a.to_json_string(), &b.to_json_string()).unwrap().is_empty());
}

#[test]
fn seed_changes_stay_in_seed_fields() {
    let mut cfg = PipelineConfig::new(Input::Rep("e7_fund56".into()), Stage::Rmatrix);
    let a = pipeline::run(&cfg).unwrap();
    cfg.seed = 11;
    let b = pipeline::run(&cfg).unwrap();
    assert!(a.pass && b.pass);
    let d = pipeline::diff_reports(&a.to_json_string(), &b.to_json_string()).unwrap();
    let paths: Vec<&str> = d.iter().map(|e| e.path.as_str()).collect();
    assert_eq!(paths, ["config.seed"]);
}

#[test]
fn diff_flags_convention_changes() {
    let cfg = PipelineConfig::new(Input::Rep("d5_halfspin16".into()), Stage::Validate);
    let a = pipeline::run(&cfg).unwrap();
    let mut golden = a.value.clone();
    golden["conventions"]["coproduct"] = "Standard".into();
    let d = pipeline::diff_reports(&serde_json::to_string(&golden).unwrap(), &a.to_json_string()).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].path, "conventions.coproduct");
}
