//! End-to-end checks of the command-line interface: exit codes, output
//! artifacts, and byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn sqc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqc"))
}

fn dataset() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/optdigits.csv")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn cost_emits_expected_json() {
    let output = sqc()
        .args(["cost", "--na", "3", "--nb", "3", "--m", "3"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["total_ceil"], 43);
    assert_eq!(report["case"], "uni-uni");
    assert_eq!(report["cnot_entangle"], 3);
}

#[test]
fn cost_selects_iso_uni_case() {
    let output = sqc()
        .args(["cost", "--na", "4", "--nb", "2", "--m", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["case"], "iso-uni");
}

#[test]
fn cost_rejects_invalid_domain() {
    let output = sqc()
        .args(["cost", "--na", "1", "--nb", "2", "--m", "1"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("n_b"), "stderr: {stderr}");
}

#[test]
fn prep_verify_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("bell.json");
    let v = 1.0 / 2.0_f64.sqrt();
    std::fs::write(&state_path, format!("[{v}, 0.0, 0.0, {v}]")).unwrap();
    let output = sqc()
        .args(["prep-verify", "--state"])
        .arg(&state_path)
        .args(["--trash-qubits", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(report["reconstruction_fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
    assert_eq!(report["measure"], 1);
    assert_eq!(report["rank"], 2);
}

#[test]
fn prep_verify_ghz_finds_rank_two() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("ghz.json");
    let v = 1.0 / 2.0_f64.sqrt();
    let mut amps = vec![0.0; 16];
    amps[0] = v;
    amps[15] = v;
    std::fs::write(&state_path, serde_json::to_string(&amps).unwrap()).unwrap();
    let output = sqc()
        .args(["prep-verify", "--state"])
        .arg(&state_path)
        .args(["--trash-qubits", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["rank"], 2);
    assert!(report["reconstruction_fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn prep_verify_rejects_unnormalized_states() {
    let dir = tempfile::tempdir().unwrap();
    let state_path = dir.path().join("bad.json");
    std::fs::write(&state_path, "[0.5, 0.5]").unwrap();
    let output = sqc()
        .args(["prep-verify", "--state"])
        .arg(&state_path)
        .args(["--trash-qubits", "1"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("norm"), "stderr: {stderr}");
}

#[test]
fn missing_dataset_gives_actionable_error() {
    let output = sqc()
        .args(["fidelity-bench", "--dataset", "/nonexistent/data.csv"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--dataset"), "stderr: {stderr}");
}

#[test]
fn fidelity_bench_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out_a, &out_b] {
        let status = sqc()
            .args(["fidelity-bench", "--dataset"])
            .arg(dataset())
            .arg("--out")
            .arg(out)
            .args([
                "--seeds",
                "2",
                "--train-per-class",
                "40",
                "--test-per-class",
                "5",
                "--seed",
                "3",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["fidelity.csv", "fidelity.json", "config.json"] {
        assert_eq!(
            read(&out_a.join(name)),
            read(&out_b.join(name)),
            "artifact {name} differs between reruns"
        );
    }
    let csv = read(&out_a.join("fidelity.csv"));
    assert!(csv.starts_with("Label,Zero Avg,Zero Std,Opt1 Avg,Opt1 Std,Opt2 Avg,Opt2 Std"));
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn classify_writes_phi_table_and_confusions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("clf");
    let status = sqc()
        .args(["classify", "--dataset"])
        .arg(dataset())
        .arg("--out")
        .arg(&out)
        .args([
            "--repetitions",
            "1",
            "--iterations",
            "50",
            "--train-per-class",
            "40",
            "--test-per-class",
            "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("classify.csv"));
    assert!(csv.starts_with("Label,Avg,Std"));
    assert_eq!(csv.lines().count(), 11);
    let json: serde_json::Value = serde_json::from_str(&read(&out.join("classify.json"))).unwrap();
    let confusions = json[0]["confusions"].as_array().unwrap();
    let first = &confusions[0];
    let total = first["tp"].as_u64().unwrap()
        + first["fp"].as_u64().unwrap()
        + first["tn"].as_u64().unwrap()
        + first["fn_"].as_u64().unwrap();
    assert_eq!(total, 50); // 5 test samples x 10 classes
}

#[test]
fn qae_bench_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("qae");
    let status = sqc()
        .args(["qae-bench", "--dataset"])
        .arg(dataset())
        .arg("--out")
        .arg(&out)
        .args([
            "--budget",
            "50",
            "--train-per-class",
            "20",
            "--test-per-class",
            "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("qae.csv"));
    assert!(csv.starts_with("Label,QAE Avg,QAE Std,SQC Avg,SQC Std"));
    assert_eq!(csv.lines().count(), 11);
    let config: serde_json::Value = serde_json::from_str(&read(&out.join("config.json"))).unwrap();
    assert_eq!(config["train"]["budget"], 50);
    assert_eq!(config["train"]["optimizer"], "rotosolve");
}
