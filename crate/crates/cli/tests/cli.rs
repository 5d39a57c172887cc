use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn chromfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chromfn")).args(args).output().expect("run chromfn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn graph(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn k2(dir: &TempDir) -> PathBuf {
    graph(dir, "k2.txt", "v a 1\nv b 1\ne a b\n")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_one_graph_passes() {
    let dir = TempDir::new().unwrap();
    let g = k2(&dir);
    let out = chromfn(&["verify", "--identity", "prop3", "--graph", s(&g), "--grid", "default"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["cases"].as_array().unwrap().len() as u64, v["summary"]["cases"].as_u64().unwrap());
    assert_eq!(v["provenance"]["identity"], "prop3");
}

#[test]
fn verify_small_corpus_reports_weighted_placement() {
    let out = chromfn(&["verify", "--identity", "lemma6", "--grid", "quick", "--max-vertices", "3", "--max-edges", "3", "--random", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["summary"]["findings"]["placement=outer"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_identity_is_bad_input() {
    let out = chromfn(&["verify", "--identity", "lemma99", "--grid", "quick"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_u_of_triangle() {
    let dir = TempDir::new().unwrap();
    let g = graph(&dir, "c3.txt", "v a 1\nv b 1\nv c 1\ne a b\ne b c\ne c a\n");
    let v = json(&chromfn(&["compute", "--function", "u", "--graph", s(&g)]));
    let terms = v["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    assert_eq!(terms[0]["partition"], serde_json::json!([3]));
    assert_eq!(terms[0]["coeff"], "3");
}

#[test]
fn compute_algorithms_agree() {
    let dir = TempDir::new().unwrap();
    let g = graph(&dir, "p3.txt", "v a 2\nv b 1\nv c 1\ne a b\ne b c\ne a b\n");
    let results: Vec<Value> = ["statesum", "subset", "delcon"]
        .iter()
        .map(|alg| json(&chromfn(&["compute", "--function", "m", "--graph", s(&g), "--r", "3/2", "--q", "2", "--k", "3", "--algorithm", alg]))["result"].clone())
        .collect();
    assert_eq!(results[0], results[1]);
    assert_eq!(results[1], results[2]);
}

#[test]
fn threshold_scan_json_and_csv() {
    let v = json(&chromfn(&["threshold-scan", "--max", "60"]));
    assert_eq!(v["first_exceedance"], 39);
    let row = &v["rows"][38];
    assert_eq!(row["p"], "31185");
    assert_eq!(row["bound"], "29680");

    let out = chromfn(&["threshold-scan", "--max", "40", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,p,bound,exceeds");
    assert_eq!(lines[38], "38,26015,27456,false");
    assert_eq!(lines[39], "39,31185,29680,true");
}

#[test]
fn partition_rank_small() {
    for mode in ["exact", "modular"] {
        let v = json(&chromfn(&["partition-rank", "--n", "5", "--mode", mode]));
        assert_eq!(v["rank"], 7);
        assert_eq!(v["full_rank"], true);
    }
}

#[test]
fn parse_error_exits_2() {
    let dir = TempDir::new().unwrap();
    let g = graph(&dir, "bad.txt", "v a 1\ne a zz\n");
    let out = chromfn(&["compute", "--function", "m", "--graph", s(&g)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));
}

#[test]
fn cap_exceeded_exits_3() {
    let dir = TempDir::new().unwrap();
    let g = k2(&dir);
    let out = chromfn(&["compute", "--function", "m", "--graph", s(&g), "--algorithm", "statesum", "--cap-states", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic_and_out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = chromfn(&["corpus-check", "--grid", "quick", "--max-vertices", "3", "--max-edges", "3", "--random", "4", "--n", "6", "--out", s(p)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["pass"], true);
}
