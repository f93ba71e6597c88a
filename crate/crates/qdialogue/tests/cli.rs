//! End-to-end tests of the `qdialogue` binary: exit-status discipline
//! and artifact determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qdialogue"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdialogue-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn dialogue_happy_path_writes_transcript() {
    let dir = scratch("dialogue");
    let out = dir.join("transcript.json");
    let output = run(&["dialogue", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["aborted"], serde_json::Value::Bool(false));
    assert!(!value["decoded_alice"].as_array().unwrap().is_empty());
    assert!(!value["decoded_bob"].as_array().unwrap().is_empty());
}

#[test]
fn dialogue_under_attack_exits_with_abort_status() {
    let dir = scratch("abort");
    let config = dir.join("config.json");
    fs::write(
        &config,
        r#"{
            "n": 4,
            "decoy": {"mode": {"kind": "count", "count": 20}, "error_threshold": 0.0},
            "attack": {"kind": {"kind": "intercept_resend", "basis_strategy": "random_zx"}, "target_step": "step1"},
            "seed": 3
        }"#,
    )
    .unwrap();
    let out = dir.join("transcript.json");
    let output = run(&[
        "dialogue",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        output.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("step1"),
        "diagnostics lack the step: {stderr}"
    );
    // The transcript is still written and shows the failed check.
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"passed\": false"));
}

#[test]
fn malformed_config_is_a_usage_error_without_output() {
    let dir = scratch("malformed");
    let config = dir.join("config.json");
    fs::write(&config, r#"{"n": 4, "bogus_key": 1}"#).unwrap();
    let out = dir.join("should_not_exist.json");
    let output = run(&[
        "dialogue",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn sweep_needs_at_least_two_thetas() {
    let dir = scratch("sweep-one");
    let config = dir.join("config.json");
    fs::write(&config, r#"{"sweep": {"thetas": [0.5]}}"#).unwrap();
    let output = run(&["attack-sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_emits_deterministic_csv() {
    let _dir = scratch("sweep");
    let args = ["attack-sweep", "--seed", "9", "--trials", "50"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta,metric_decoy,metric_dialogue,trials,ci_low,ci_high"
    );
    assert_eq!(lines.count(), 3);
    let second = run(&args);
    assert_eq!(String::from_utf8(second.stdout).unwrap(), text);
}

#[test]
fn efficiency_reports_and_self_checks() {
    let output = run(&["efficiency", "--seed", "1"]);
    assert_eq!(output.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("efficiency emits JSON");
    assert_eq!(value["matches"], serde_json::Value::Bool(true));
    assert_eq!(value["formula"]["eta"], value["audit"]["eta"]);
    // Default config: 1 round, so η = 2/(3+1) per photon.
    assert_eq!(value["formula"]["eta"].as_f64().unwrap(), 0.5);
}

#[test]
fn keygen_check_reports_clean_channel() {
    let output = run(&["keygen-check", "--seed", "2", "--trials", "20"]);
    assert_eq!(output.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["aborts"], 0);
    assert_eq!(value["per_decoy_rate"].as_f64().unwrap(), 0.0);
    let fidelity = value["mean_min_key_fidelity"].as_f64().unwrap();
    assert!((fidelity - 1.0).abs() < 1e-9);
}

#[test]
fn keygen_check_under_attack_reports_high_abort_rate() {
    let dir = scratch("keygen-attack");
    let config = dir.join("config.json");
    fs::write(
        &config,
        r#"{
            "n": 4,
            "decoy": {"mode": {"kind": "count", "count": 20}, "error_threshold": 0.0},
            "attack": {"kind": {"kind": "entangle_ancilla"}, "target_step": "step1"}
        }"#,
    )
    .unwrap();
    let output = run(&[
        "keygen-check",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "5",
        "--trials",
        "100",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    // P(abort) = 1 − (3/4)^20 ≈ 0.997 per trial.
    assert!(value["abort_rate"].as_f64().unwrap() > 0.9);
    let rate = value["per_decoy_rate"].as_f64().unwrap();
    assert!((rate - 0.25).abs() < 0.05, "per-decoy rate {rate}");
}

#[test]
fn dialogue_rejects_csv_format() {
    let output = run(&["dialogue", "--format", "csv"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let output = run(&[
        "dialogue",
        "--out",
        "/nonexistent-dir/deeper/transcript.json",
    ]);
    assert_eq!(output.status.code(), Some(4));
}
