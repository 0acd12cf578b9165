use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbraid")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn k33_homology() {
    let r = report(&["homology", "--graph", "K33", "--n", "2", "--flavor", "unordered"]);
    assert_eq!(r["results"]["h1"], serde_json::json!({"rank": 4, "torsion": [2]}));
    assert_eq!(r["inputs"]["graph"], "K33");
}

#[test]
fn theta4_check() {
    let r = report(&["check", "--graph", "Theta4", "--n", "2"]);
    assert_eq!(r["results"]["verdict"], "match");
    assert_eq!(r["results"]["rank"], 6);
}

#[test]
fn k33_cells() {
    let r = report(&["cells", "--graph", "K33", "--n", "2"]);
    let mut cells: Vec<String> =
        r["results"]["critical"][1].as_array().unwrap().iter().map(|c| c["cell"].as_str().unwrap().to_string()).collect();
    cells.sort();
    let mut want = ["{0-3,1}", "{0-4,1}", "{0-4,5}", "{0,1-5}", "{1-5,2}", "{2-4,3}", "{0,3-5}"];
    want.sort();
    assert_eq!(cells, want);
}

#[test]
fn corpus_check() {
    let r = report(&["check", "--graph", "corpus", "--seed", "3"]);
    assert_eq!(r["results"]["matched"], r["results"]["total"]);
}

#[test]
fn ordered_routes_and_beta2() {
    let r = report(&["homology", "--graph", "K5", "--flavor", "ordered"]);
    let routes = r["results"]["h1_routes"].as_object().unwrap();
    assert!(routes.values().all(|v| *v == r["results"]["h1"]));
    let b = report(&["beta2", "--graph", "K4", "--flavor", "ordered"]);
    assert_eq!(b["results"]["formula"], b["results"]["morse"]);
}

#[test]
fn deterministic() {
    let args = ["present", "--graph", "K33", "--flavor", "ordered"];
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    assert_eq!(strip(report(&args)), strip(report(&args)));
}

#[test]
fn text_format() {
    let out = run(&["formula", "--graph", "K5", "--format", "text"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("command"));
}

#[test]
fn errors() {
    assert_eq!(run(&["homology", "--graph", "NoSuchGraph"]).status.code(), Some(2));
    assert_eq!(run(&["homology", "--graph", "K33", "--mode", "planar"]).status.code(), Some(2));
    assert_eq!(run(&["beta2", "--graph", "K4", "--n", "3"]).status.code(), Some(2));
    assert!(!run(&["homology", "--flavor", "sideways"]).status.success());
}

#[test]
fn graph_file() {
    let path = std::env::temp_dir().join(format!("gbraid-cli-{}.txt", std::process::id()));
    std::fs::write(&path, "a b\nb c\nc a\nc d\nd a\n").unwrap();
    let r = report(&["check", "--graph", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(r["results"]["verdict"], "match");
}
