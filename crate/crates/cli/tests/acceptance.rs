//! Acceptance gate for the command line surface: adversarial rejection and
//! byte-level determinism, each printing a single PASS/FAIL verdict line.

use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn verdict(number: usize, label: &str, failures: &[String]) {
    let state = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number} ({label}): {state}");
    assert!(
        failures.is_empty(),
        "criterion {number} ({label}) failed:\n  {}",
        failures.join("\n  ")
    );
}

fn sparsetree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsetree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixture(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).expect("fixture written");
    path
}

const STAR4: &str = "graph 5 4 4\nterminals x1 x2 x3 x4\n\
edge c x1\nedge c x2\nedge c x3\nedge c x4\n";

#[test]
fn criterion_8_adversarial_detection() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let star = write_fixture(dir.path(), "star4.txt", STAR4);
    let emitted = dir.path().join("h.json");
    let out = sparsetree(&[
        "sparsify",
        star.to_str().unwrap(),
        "--mode",
        "tree",
        "--out",
        emitted.to_str().unwrap(),
    ]);
    if !out.status.success() {
        failures.push(format!("sparsify failed: {}", String::from_utf8_lossy(&out.stderr)));
    }

    // Lower one capacity below a witnessed mincut: dropping (x1, x3) from
    // 1/2 to 1/4 undercuts the bipartition {x1, x2}, whose mincut is 2 in
    // the star but 7/4 in the damaged sparsifier.
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&emitted).unwrap()).unwrap();
    let mut damaged = false;
    for edge in doc["edges"].as_array_mut().unwrap() {
        if edge["u"] == "x1" && edge["v"] == "x3" {
            edge["num"] = json!("1");
            edge["den"] = json!("4");
            edge["approx"] = json!(0.25);
            damaged = true;
        }
    }
    assert!(damaged, "fixture edge (x1, x3) exists");
    let perturbed = write_fixture(dir.path(), "bad.json", &doc.to_string());

    let out = sparsetree(&[
        "verify",
        star.to_str().unwrap(),
        perturbed.to_str().unwrap(),
        "--kind",
        "cut",
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(1) {
        failures.push(format!(
            "expected exit code 1 for the perturbed sparsifier, got {:?}\nstdout: {stdout}",
            out.status.code()
        ));
    }
    if !stdout.contains("witness cut {x1, x2}") {
        failures.push(format!("expected the witness cut {{x1, x2}} in the report:\n{stdout}"));
    }
    if !stdout.contains("verdict: rejected") {
        failures.push(format!("expected a rejected verdict:\n{stdout}"));
    }

    // The untouched file still verifies, so the rejection above is caused by
    // the perturbation alone.
    let out = sparsetree(&[
        "verify",
        star.to_str().unwrap(),
        emitted.to_str().unwrap(),
        "--kind",
        "cut",
    ]);
    if out.status.code() != Some(0) {
        failures.push("the unperturbed sparsifier should verify with exit code 0".into());
    }

    verdict(8, "adversarial detection", &failures);
}

#[test]
fn criterion_9_determinism() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let star = write_fixture(dir.path(), "star4.txt", STAR4);
    let suite = write_fixture(dir.path(), "suite.txt", "tree 12 4 5\ntree 18 6 6\nqb 4 7 9\n");

    let sample_args =
        ["sample", star.to_str().unwrap(), "--seed", "11", "--count", "6"];
    let first = sparsetree(&sample_args);
    let second = sparsetree(&sample_args);
    if !first.status.success() || !second.status.success() {
        failures.push("sample runs should succeed".into());
    }
    if first.stdout != second.stdout {
        failures.push("sample streams differ between two runs with the same seed".into());
    }
    if first.stdout.is_empty() {
        failures.push("sample stream is unexpectedly empty".into());
    }

    for args in [vec!["bench"], vec!["bench", "--suite", suite.to_str().unwrap()]] {
        let first = sparsetree(&args);
        let second = sparsetree(&args);
        if !first.status.success() || !second.status.success() {
            failures.push(format!("bench {args:?} should succeed"));
        }
        if first.stdout != second.stdout {
            failures.push(format!("bench CSV differs between two runs: {args:?}"));
        }
    }

    verdict(9, "determinism", &failures);
}
