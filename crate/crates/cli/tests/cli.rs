//! End-to-end tests of the `dqeig` binary: exit codes, file outputs, and the
//! JSON surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

use dqeig_core::DQMatrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dqeig"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dqeig-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn random_solve_roundtrip() {
    let dir = tmpdir("roundtrip");
    let mat = dir.join("m.json");
    let out = bin().args(["random", "--n", "6", "--seed", "5", "--out"]).arg(&mat).output().unwrap();
    assert!(out.status.success());

    // the file parses back into the schema
    let parsed = DQMatrix::from_json(&std::fs::read_to_string(&mat).unwrap()).unwrap();
    assert_eq!(parsed.rows(), 6);

    let out = bin()
        .args(["solve", "--method", "threshold", "--json", "--input"])
        .arg(&mat)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["status"], "Converged");
    assert_eq!(doc["eigenvalues"].as_array().unwrap().len(), 6);
    assert!(doc["e_lambda"].as_f64().unwrap() < 1e-5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn demo_writes_to_stdout_by_default() {
    let out = bin().args(["demo", "p5"]).output().unwrap();
    assert!(out.status.success());
    let m = DQMatrix::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(m.rows(), 5);
    assert!(m.is_hermitian());
}

#[test]
fn degenerate_spectrum_exit_code() {
    let dir = tmpdir("degenerate");
    let p5 = dir.join("p5.json");
    assert!(bin().args(["demo", "p5", "--out"]).arg(&p5).output().unwrap().status.success());

    let out = bin().args(["solve", "--method", "max", "--input"]).arg(&p5).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["solve", "--method", "3sjacobi", "--input"]).arg(&p5).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solver_parameters_are_accepted() {
    let dir = tmpdir("params");
    let mat = dir.join("m.json");
    assert!(bin().args(["random", "--n", "4", "--seed", "9", "--out"]).arg(&mat).output().unwrap().status.success());
    let out = bin()
        .args([
            "solve", "--method", "3sjacobi", "--eps", "1e-8", "--delta", "0.5", "--delta1", "0.5",
            "--rho2", "0.2", "--eta", "1e-8", "--s", "3", "--post-correct", "--json", "--input",
        ])
        .arg(&mat)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert!(doc["e_lambda"].as_f64().unwrap() < 1e-6);

    let out = bin()
        .args(["solve", "--method", "3sjacobi", "--adaptive-s", "--json", "--input"])
        .arg(&mat)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn trace_and_vectors_files() {
    let dir = tmpdir("artifacts");
    let mat = dir.join("m.json");
    let trace = dir.join("trace.csv");
    let vecs = dir.join("vectors.json");
    assert!(bin().args(["random", "--n", "5", "--seed", "3", "--out"]).arg(&mat).output().unwrap().status.success());

    let out = bin()
        .args(["solve", "--method", "threshold", "--input"])
        .arg(&mat)
        .arg("--trace")
        .arg(&trace)
        .arg("--vectors")
        .arg(&vecs)
        .output()
        .unwrap();
    assert!(out.status.success());

    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("iteration,r,n_st,n_du,max_offdiag,elapsed_ms"));
    assert!(trace_text.lines().count() > 2);

    let vectors = DQMatrix::from_json(&std::fs::read_to_string(&vecs).unwrap()).unwrap();
    assert!(vectors.is_unitary());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn laplacian_generation_and_validation() {
    let dir = tmpdir("laplacian");
    let mat = dir.join("lap.json");
    let out = bin()
        .args(["laplacian", "--n", "10", "--sparsity", "0.2", "--seed", "1", "--out"])
        .arg(&mat)
        .output()
        .unwrap();
    assert!(out.status.success());
    let lap = DQMatrix::from_json(&std::fs::read_to_string(&mat).unwrap()).unwrap();
    assert!(lap.is_hermitian());

    // invalid sparsity is a plain error
    let out = bin()
        .args(["laplacian", "--n", "10", "--sparsity", "1.5", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sparsity"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_and_malformed_inputs_exit_one() {
    let out = bin()
        .args(["solve", "--method", "max", "--input", "/nonexistent/matrix.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let dir = tmpdir("malformed");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"st\": [[[0,0,0,0]]], \"du\": []}").unwrap();
    let out = bin().args(["solve", "--method", "max", "--input"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // non-Hermitian input is rejected
    let lopsided = dir.join("lopsided.json");
    std::fs::write(
        &lopsided,
        "{\"n\":2,\"st\":[[[0,0,0,0],[1,0,0,0]],[[0,0,0,0],[0,0,0,0]]],\"du\":[[[0,0,0,0],[0,0,0,0]],[[0,0,0,0],[0,0,0,0]]]}",
    )
    .unwrap();
    let out = bin().args(["solve", "--method", "max", "--input"]).arg(&lopsided).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_writes_reports() {
    let dir = tmpdir("bench");
    let report = dir.join("report");
    let out = bin()
        .args(["bench", "--kind", "random", "--sizes", "4,6", "--trials", "2", "--seed", "17", "--report"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("label,row,trial,n,"));
    // two sizes x (two trials + one mean)
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let jsonl = std::fs::read_to_string(dir.join("report.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 6);

    let out = bin()
        .args(["bench", "--kind", "laplacian", "--sizes", "8", "--trials", "2", "--seed", "2", "--sparsity", "0.3", "--report"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("laplacian-n8"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_and_bad_usage_exit_codes() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("solve"));

    let out = bin().args(["solve", "--method", "nonsense", "--input", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
