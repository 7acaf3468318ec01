//! End-to-end tests for the binary: exit codes, JSON round trips, byte
//! determinism, corpus handling and the class-group cache.

use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hermext"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn classgroup_json_matches_known_value() {
    let out = run(&["classgroup", "-m", "23", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["h"], 3);
    assert_eq!(v["structure"], serde_json::json!([3]));
    assert_eq!(v["forms"], serde_json::json!([[1, 1, 6], [2, -1, 3], [2, 1, 3]]));
}

#[test]
fn torsion_counts() {
    let out = run(&["torsion", "-m", "23", "-n", "3", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["torsion"].as_array().unwrap().len(), 3);
    let out = run(&["torsion", "-m", "5", "-n", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["torsion"].as_array().unwrap().len(), 1);
}

#[test]
fn cosets_emit_parseable_matrices() {
    let out = run(&["cosets", "-m", "23", "-n", "3", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    for rec in arr {
        // every emitted matrix re-parses and re-validates
        hermext::matgroup::ScaledMatrix::from_json(&rec["matrix"]).unwrap();
    }
}

#[test]
fn atkin_lists_squarefree_divisors() {
    let out = run(&["atkin", "-m", "5", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ds: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, vec![1, 2, 5, 10]);
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        vec!["classgroup", "-m", "14", "--json"],
        vec!["cosets", "-m", "5", "-n", "2", "--json"],
        vec!["verify", "--suite", "cosets", "-m", "5", "-n", "2", "--json"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(stdout(&a), stdout(&b), "args: {args:?}");
    }
}

#[test]
fn phi_round_trip_through_stdin() {
    let out = run(&["atkin", "-m", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let matrix = serde_json::to_string(&v[1]["matrix"]).unwrap();
    let mut child = bin()
        .arg("phi")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.as_mut().unwrap().write_all(matrix.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let image: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // phi(W_2) is integral: no '/' in any entry
    for row in image.as_array().unwrap() {
        for cell in row.as_array().unwrap() {
            assert!(!cell.as_str().unwrap().contains('/'));
        }
    }
}

#[test]
fn exit_code_two_on_usage_errors() {
    // non-squarefree m
    let out = run(&["classgroup", "-m", "12"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed phi input names the offending field
    let mut child = bin()
        .arg("phi")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.as_mut().unwrap().write_all(b"{\"m\": 5}").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("missing `n`"), "stderr: {err}");
    // unknown suite
    let out = run(&["verify", "--suite", "bogus", "-m", "5"]);
    assert_eq!(out.status.code(), Some(2));
    // verify without -m or --corpus
    let out = run(&["verify", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown flag goes through clap
    let out = run(&["classgroup", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corpus_runs_and_rejects_bad_lines() {
    let dir = std::env::temp_dir().join(format!("hermext-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let corpus = dir.join("corpus.txt");
    std::fs::write(&corpus, "# test corpus\n5,2\n1\n").unwrap();
    let out = run(&["verify", "--suite", "cosets", "--corpus", corpus.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert!(arr.iter().all(|r| r["ok"] == serde_json::Value::Bool(true)));
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "5,x\n").unwrap();
    let out = run(&["verify", "--corpus", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cache_round_trip_and_reuse() {
    let dir = std::env::temp_dir().join(format!("hermext-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.to_str().unwrap();
    let a = run(&["classgroup", "-m", "23", "--json", "--cache", cache]);
    assert!(a.status.success());
    let entry: PathBuf = dir.join("classgroup-v1-m23.json");
    assert!(entry.exists(), "cache entry written");
    // cached result is identical
    let b = run(&["classgroup", "-m", "23", "--json", "--cache", cache]);
    assert_eq!(stdout(&a), stdout(&b));
    // a corrupt cache entry is ignored and rewritten
    std::fs::write(&entry, "{\"h\": 999}").unwrap();
    let c = run(&["classgroup", "-m", "23", "--json", "--cache", cache]);
    assert_eq!(stdout(&a), stdout(&c));
    // environment variable works too
    let d = bin()
        .args(["classgroup", "-m", "23", "--json"])
        .env("HERMEXT_CACHE_DIR", cache)
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&d));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_reports_witness_and_exit_one_on_failure() {
    let out = run(&["verify", "--suite", "all", "-m", "5", "-n", "2", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], serde_json::Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 12);
    // timings flag attaches millis
    let out = run(&["verify", "--suite", "cosets", "-m", "5", "--json", "--timings"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["checks"][0].get("millis").is_some());
    // an unattainable tolerance makes the floating checks fail: exit 1 with a
    // witness identifying the offending check
    let out = run(&["verify", "--suite", "phi", "-m", "5", "--tolerance", "1e-30", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], serde_json::Value::Bool(false));
    let failing: Vec<&serde_json::Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| !c["witness"].is_null()));
}
