//! End-to-end runs of the fg binary: envelope shape, exit codes, seeded
//! reproducibility, and agreement with the shipped schemas and fixtures.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fg")).args(args).output().expect("binary runs")
}

fn envelope(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a json envelope")
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn fixture(name: &str) -> String {
    repo_path("fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn nielsen_exact_envelope() {
    let v = envelope(&fg(&["stretch", "exact", "--k", "2", "--phi", "a->ab;b->b"]));
    assert_eq!(v["config"]["command"], "stretch exact");
    assert_eq!(v["config"]["k"], 2);
    let r = &v["result"];
    assert_eq!(r["lambda"], "7/6");
    assert_eq!(r["window"], 1);
    assert_eq!(r["simple"], false);
    assert_eq!(r["scaled_integer"], "14");
    let checksum = r["checksum"].as_str().expect("checksum string");
    assert_eq!(checksum.len(), 16);
    assert!(checksum.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn letter_swap_is_simple() {
    let v = envelope(&fg(&["stretch", "exact", "--phi", "a->b;b->a"]));
    assert_eq!(v["result"]["lambda"], "1/1");
    assert_eq!(v["result"]["simple"], true);
}

#[test]
fn parse_error_exits_two() {
    let out = fg(&["stretch", "exact", "--k", "2", "--phi", "a-b"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn instability_exits_three() {
    let out =
        fg(&["stretch", "exact", "--k", "2", "--phi", "a->a;b->a", "--budget", "20000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stabilize"));
}

#[test]
fn missing_file_exits_two() {
    let out = fg(&["tree", "lambda", "--graph", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args =
        ["stretch", "mc", "--phi", "a->ab;b->b", "--n", "2000", "--trials", "3", "--seed", "11"];
    let first = fg(&args);
    let second = fg(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn rose_action_lambda_is_one() {
    let v = envelope(&fg(&["tree", "lambda", "--graph", &fixture("rose2.json")]));
    assert_eq!(v["result"]["lambda"], "1/1");
    assert_eq!(v["result"]["mode"], "exact");
}

#[test]
fn rose_relabel_is_cayley_like() {
    let v = envelope(&fg(&[
        "tree",
        "gap",
        "--graph",
        &fixture("rose2.json"),
        "--alpha",
        "a->b2;b->b1",
    ]));
    assert_eq!(v["result"]["class"], "cayley-like");
    assert_eq!(v["result"]["lambda"], "1/1");
}

#[test]
fn barbell_is_gapped() {
    let v = envelope(&fg(&["tree", "gap", "--graph", &fixture("barbell.json")]));
    assert_eq!(v["result"]["class"], "gapped");
    assert_eq!(v["result"]["gap_bound"], "7/6");
}

#[test]
fn loops4_lambda_near_half() {
    let v = envelope(&fg(&[
        "lang",
        "lambda",
        "--automaton",
        &fixture("loops4.json"),
        "--k",
        "2",
        "--n",
        "20000",
        "--trials",
        "4",
    ]));
    let mean = v["result"]["mean"].as_f64().expect("mean");
    assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
}

#[test]
fn csv_format_flattens_the_envelope() {
    let out = fg(&[
        "stretch", "exact", "--k", "2", "--phi", "a->ab;b->b", "--format", "csv",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(text.contains("result.lambda,7/6"));
    assert!(text.contains("config.command,stretch exact"));
}

#[test]
fn human_format_prints_paths() {
    let out = fg(&[
        "stretch", "exact", "--k", "2", "--phi", "a->ab;b->b", "--format", "human",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("result.lambda = 7/6"));
}

#[test]
fn threads_flag_is_accepted() {
    let out = fg(&[
        "--threads", "1", "stretch", "mc", "--phi", "a->ab;b->b", "--n", "500", "--trials", "2",
    ]);
    assert!(out.status.success());
}

#[test]
fn hausdorff_matches_the_formula() {
    let v = envelope(&fg(&["stretch", "hd", "--lambda", "7/6", "--k", "2"]));
    let dim = v["result"]["dimension"].as_f64().expect("dimension");
    assert!((dim - 3f64.ln() / (7.0 / 6.0)).abs() < 1e-12);
}

#[test]
fn whitehead_minimize_keeps_the_commutator() {
    let v = envelope(&fg(&["whitehead", "minimize", "--w", "abAB"]));
    assert_eq!(v["result"]["minimal_len"], 4);
    assert_eq!(v["result"]["strictly_minimal"], false);
}

#[test]
fn sample_completion_is_accepted() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("two-state.json");
    let spec = serde_json::json!({
        "states": ["q1", "q2"],
        "start": ["q1"],
        "accept": ["q2"],
        "edges": [
            { "from": "q1", "label": "a", "to": "q2" },
            { "from": "q2", "label": "b", "to": "q1" },
            { "from": "q2", "label": "a", "to": "q2" },
        ],
    });
    let mut f = std::fs::File::create(&path).expect("create");
    write!(f, "{spec}").expect("write");
    let v = envelope(&fg(&[
        "lang",
        "sample",
        "--automaton",
        path.to_str().expect("utf8 path"),
        "--n",
        "9",
        "--seed",
        "3",
        "--mu",
        "start",
        "--complete",
    ]));
    assert_eq!(v["result"]["accepted"], true);
    let labels = v["result"]["labels"].as_str().expect("labels");
    assert_eq!(labels.len(), 9);
}

/// The shipped schemas stay in lockstep with what the binary prints and
/// what the fixtures contain: required keys present, rationals "p/q",
/// checksums 16 hex digits.
#[test]
fn outputs_and_fixtures_conform_to_the_schemas() {
    let read = |rel: &str| -> Value {
        let text = std::fs::read_to_string(repo_path(rel)).expect("schema file");
        serde_json::from_str(&text).expect("schema json")
    };
    let required = |schema: &Value, pointer: &str| -> Vec<String> {
        schema
            .pointer(pointer)
            .and_then(Value::as_array)
            .expect("required list")
            .iter()
            .map(|v| v.as_str().expect("key").to_string())
            .collect()
    };

    let out_schema = read("schemas/cli-output.schema.json");
    let v = envelope(&fg(&["stretch", "exact", "--k", "2", "--phi", "a->ab;b->b"]));
    for key in required(&out_schema, "/required") {
        assert!(v.get(&key).is_some(), "envelope missing {key}");
    }
    for key in required(&out_schema, "/definitions/exactLambda/required") {
        assert!(v["result"].get(&key).is_some(), "exact result missing {key}");
    }
    let lambda = v["result"]["lambda"].as_str().expect("lambda");
    let (num, den) = lambda.split_once('/').expect("p/q form");
    num.parse::<i64>().expect("numerator");
    assert!(den.parse::<i64>().expect("denominator") > 0);

    let graph_schema = read("schemas/graph.schema.json");
    let rose: Value = read("fixtures/rose2.json");
    for key in required(&graph_schema, "/required") {
        assert!(rose.get(&key).is_some(), "rose2 missing {key}");
    }
    for key in required(&graph_schema, "/properties/edges/items/required") {
        assert!(rose["edges"][0].get(&key).is_some(), "rose2 edge missing {key}");
    }

    let automaton_schema = read("schemas/automaton.schema.json");
    let loops: Value = read("fixtures/loops4.json");
    for key in required(&automaton_schema, "/required") {
        assert!(loops.get(&key).is_some(), "loops4 missing {key}");
    }
    for key in required(&automaton_schema, "/properties/edges/items/required") {
        assert!(loops["edges"][0].get(&key).is_some(), "loops4 edge missing {key}");
    }
}

#[test]
fn nbsrw_spec_round_trips_through_check() {
    let out = fg(&["lang", "nbsrw", "--k", "2"]);
    let v = envelope(&out);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("nbsrw.json");
    std::fs::write(&path, v["result"].to_string()).expect("write");
    let check = envelope(&fg(&[
        "lang",
        "check",
        "--automaton",
        path.to_str().expect("utf8 path"),
        "--k",
        "2",
    ]));
    assert_eq!(check["result"]["normal"], true);
    assert_eq!(check["result"]["states"], 4);
    assert_eq!(check["result"]["edges"], 12);
}
