use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spexp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spexp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(dir: &Path, args: &[&str]) -> Value {
    let out = spexp(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn close(v: &Value, expected: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() < 1e-12
}

#[test]
fn classical_and_quantum_expansion_of_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(spexp(d, &["gen", "cycle", "--n", "8", "-o", "c8.json"]).status.success());
    assert!(spexp(d, &["gen", "permutation-tuple", "--from", "c8.json", "-o", "t.json"]).status.success());

    let classical = json(d, &["expansion", "c8.json", "--mode", "classical"]);
    assert!(close(&classical["value"], 0.25), "{classical}");
    assert_eq!(classical["manifest"]["subcommand"], "expansion");

    let coordinate = json(d, &["expansion", "t.json", "--mode", "q", "--strategy", "coordinate"]);
    assert!(close(&coordinate["value"], 0.25), "{coordinate}");

    // Non-coordinate subspaces do better on a cycle.
    let riemannian = json(
        d,
        &["expansion", "t.json", "--mode", "sp", "--p", "2", "--strategy", "riemannian", "--k", "4"],
    );
    assert!(riemannian["value"].as_f64().unwrap() <= 0.25 + 1e-12);
}

#[test]
fn graph_inputs_are_decomposed_for_quantum_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(spexp(d, &["gen", "hypercube", "--k", "3", "-o", "q3.json"]).status.success());
    let est = json(d, &["expansion", "q3.json", "--mode", "q", "--strategy", "coordinate"]);
    assert!(close(&est["value"], 1.0 / 3.0), "{est}");
}

#[test]
fn decompose_reports_d_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = spexp(d, &["gen", "random-regular", "--n", "40", "--d", "5", "--seed", "3", "-o", "g.json"]);
    assert!(gen.status.success());
    let out = json(d, &["decompose", "g.json"]);
    assert_eq!(out["d"], 5);
}

#[test]
fn embed_reports_estimate_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(spexp(d, &["gen", "complete", "--n", "4", "-o", "k4.json"]).status.success());
    let out = json(d, &["embed", "k4.json", "--p", "1"]);
    assert!((out["estimate"]["value"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6, "{out}");
    assert!(close(&out["metric_ratio_r"], 4.0 / 3.0));
    assert!(out["lower_bound"]["distortion_lower_bound"].as_f64().unwrap() <= 1.0 + 1e-9);

    let sp = json(d, &["embed", "k4.json", "--target", "sp", "--p", "1.5", "--m", "3"]);
    let cmp = &sp["s2_comparison"];
    assert!(close(&cmp["h_s2"], (4.0f64 / 3.0).sqrt()), "{cmp}");
    assert!(close(&cmp["ratio"], cmp["h_sp"].as_f64().unwrap() / cmp["h_s2"].as_f64().unwrap()));
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = spexp(d, &["verify", "--instances", "50", "--seed", "11", "--out", "r.json"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&std::fs::read(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["manifest"]["seed"], 11);
    // Only the report itself lands next to the output.
    let names: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("r.json")]);
}

#[test]
fn exit_codes_distinguish_input_errors_from_infeasible_requests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), r#"{"adjacency": [[0, 1], [0, 0]]}"#).unwrap();
    assert_eq!(spexp(d, &["decompose", "bad.json"]).status.code(), Some(2));
    assert_eq!(spexp(d, &["decompose", "missing.json"]).status.code(), Some(2));

    assert!(spexp(d, &["gen", "cycle", "--n", "30", "-o", "c30.json"]).status.success());
    assert_eq!(spexp(d, &["expansion", "c30.json", "--mode", "classical"]).status.code(), Some(3));
    assert!(spexp(d, &["gen", "cycle", "--n", "6", "-o", "c6.json"]).status.success());
    let dim = spexp(d, &["expansion", "c6.json", "--mode", "dim", "--strategy", "riemannian"]);
    assert_eq!(dim.status.code(), Some(3));
}
