use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn quiver(name: &str) -> String {
    corpus_dir().join("quivers").join(format!("{name}.json")).display().to_string()
}

fn rep(name: &str) -> String {
    corpus_dir().join("reps").join(format!("{name}.json")).display().to_string()
}

fn mixq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixq")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = mixq(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report_version"], 1);
    v
}

#[test]
fn lattice_of_toeplitz() {
    let v = json_ok(&["lattice", &quiver("toeplitz")]);
    assert_eq!(v["count"], 3);
    assert_eq!(v["sets"], serde_json::json!([[], ["2"], ["1", "2"]]));
}

#[test]
fn validate_reports_levels_and_rejects_dangling_edges() {
    let v = json_ok(&["validate", &quiver("cycle_tail")]);
    assert_eq!(v["chain_length"], 2);
    assert_eq!(v["levels"]["1"], 0);
    assert_eq!(v["levels"]["4"], 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"vertices": ["1"], "edges": [{"id": "e", "src": "1", "dst": "2"}]}"#).unwrap();
    let out = mixq(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undeclared"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mixq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mixq(&["cut", &quiver("toeplitz"), "--expr", "f"]).status.code(), Some(2));
    assert_eq!(mixq(&["check-identities", &quiver("toeplitz"), "--check", "nonsense"]).status.code(), Some(2));
    assert_eq!(mixq(&["lattice", "/nonexistent/quiver.json"]).status.code(), Some(2));
}

#[test]
fn check_identities_pass() {
    let v = json_ok(&[
        "check-identities",
        &quiver("toeplitz"),
        "--order",
        "4",
        "--trials",
        "20",
        "--rep",
        &rep("toeplitz.0"),
        "--rep",
        &rep("toeplitz.1"),
    ]);
    assert_eq!(v["passed"], true);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 11);
    for r in results {
        let expected = if r["check"] == "transduction" { "witness-found" } else { "pass" };
        assert_eq!(r["outcome"], expected, "{r}");
    }
}

#[test]
fn special_edge_choice_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"1": "f"}"#).unwrap();
    let v = json_ok(&["lpa-reduce", &quiver("toeplitz_swapped"), "--expr", "e.~e + f.~f", "--choice", good.to_str().unwrap()]);
    assert_eq!(v["normal_form"], "1 * @1");
    assert_eq!(v["special_edges"]["1"], "f");

    // `e` climbs a level, so it cannot be special.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"1": "e"}"#).unwrap();
    let out = mixq(&["lpa-reduce", &quiver("toeplitz_swapped"), "--expr", "@1", "--choice", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lpa_reduce_from_element_file() {
    let dir = tempfile::tempdir().unwrap();
    let elem = dir.path().join("x.txt");
    std::fs::write(&elem, "f.~f + e.~e\n").unwrap();
    let v = json_ok(&["lpa-reduce", &quiver("toeplitz"), elem.to_str().unwrap()]);
    assert_eq!(v["normal_form"], "1 * @1");
}

#[test]
fn series_expand_geometric() {
    let v = json_ok(&["series-expand", &quiver("rose"), &rep("rose.0"), "--order", "3"]);
    assert_eq!(v["series"], "1 * @v + 1 * a + 1 * a.a + 1 * a.a.a");
    assert_eq!(v["mixed_valid"], true);
}

#[test]
fn cut_and_corner() {
    let v = json_ok(&["cut", &quiver("toeplitz"), "--expr", "f + w * e", "--at", "1"]);
    assert_eq!(v["output"], "1 * f");
    assert_eq!(v["target"]["quiver"]["vertices"], serde_json::json!(["1"]));
    let v = json_ok(&["corner", &quiver("toeplitz"), "--expr", "f + w * e + w * @2", "--at", "0"]);
    assert_eq!(v["output"], "w * @2");
    assert_eq!(v["target"]["quiver"]["window"], serde_json::json!([1, 1]));
    let v = json_ok(&["corner", &quiver("toeplitz"), "--expr", "f.~f", "--at", "1", "--algebra", "lpa"]);
    assert_eq!(v["output"], "1 * f.~f");
    // w lives only over vertex 2 in E_T.
    assert_eq!(mixq(&["cut", &quiver("toeplitz"), "--expr", "w * f", "--at", "1"]).status.code(), Some(2));
}

#[test]
fn quotient_and_restriction() {
    let v = json_ok(&["quotient", &quiver("cycle_tail"), "--set", "3,4"]);
    assert_eq!(v["quiver"]["vertices"], serde_json::json!(["1", "2"]));
    assert_eq!(v["levels"]["1"], 0);
    let v = json_ok(&["restrict", &quiver("cycle_tail"), "--set", "3,4"]);
    assert_eq!(v["quiver"]["vertices"], serde_json::json!(["3", "4"]));
    assert_eq!(v["levels"]["3"], 1);
    assert_eq!(mixq(&["quotient", &quiver("a2"), "--set", "2"]).status.code(), Some(2));
}

#[test]
fn monoid_commands() {
    let v = json_ok(&["monoid", "nf", &quiver("chain3"), "2 * @1 + @2"]);
    assert_eq!(v["normal_form"], "3 * @3");
    let v = json_ok(&["monoid", "eq", &quiver("toeplitz"), "@1", "@1 + @2"]);
    assert_eq!(v["equal"], "yes");
    let v = json_ok(&["monoid", "eq", &quiver("toeplitz"), "@2", "2 * @2", "--bound", "10"]);
    assert_eq!(v["equal"], "no");
    let v = json_ok(&["monoid", "ideals", &quiver("edgeless")]);
    assert_eq!(v["lattice"]["ideals"].as_array().unwrap().len(), 4);
    assert_eq!(mixq(&["monoid", "nf", &quiver("toeplitz"), "@1"]).status.code(), Some(2));
}

#[test]
fn corpus_runs_deterministically() {
    let corpus = corpus_dir().join("corpus.json");
    let args = ["corpus", corpus.to_str().unwrap(), "--trials", "10", "--order", "4"];
    let first = mixq(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    assert_eq!(mixq(&args).stdout, first.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["edgeless", "a2", "toeplitz", "toeplitz_swapped", "rose", "chain3", "cycle_tail"]);
}

#[test]
fn unmet_expectations_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(corpus_dir().join("corpus.json")).unwrap();
    let mut corpus: Value = serde_json::from_str(&text).unwrap();
    // Claim a witness where there is none.
    corpus["entries"][1]["checks"] = serde_json::json!([{ "check": "transduction", "expect": "witness-found" }]);
    corpus["entries"][1]["quiver"] = Value::String(quiver("a2"));
    corpus["entries"][1]["reps"] = serde_json::json!([]);
    let entries = vec![corpus["entries"][1].clone()];
    let path = dir.path().join("corpus.json");
    std::fs::write(&path, serde_json::json!({ "entries": entries }).to_string()).unwrap();
    let out = mixq(&["corpus", path.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["checks"][0]["met"], false);
    assert_eq!(v["results"][0]["checks"][0]["outcome"], "pass");
}

#[test]
fn bundled_corpus_is_current() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(&["corpus", "--init", dir.path().to_str().unwrap()]);
    for rel in v["written"].as_array().unwrap() {
        let rel = rel.as_str().unwrap();
        let fresh = std::fs::read_to_string(dir.path().join(rel)).unwrap();
        let committed = std::fs::read_to_string(corpus_dir().join(rel)).unwrap();
        assert_eq!(fresh, committed, "{rel} is stale; regenerate with `mixq corpus --init corpus`");
    }
}
