//! End-to-end tests of the binary: JSON output, exit codes, determinism, and
//! file emission.

use std::process::{Command, Output};

fn braidrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidrep"))
        .args(args)
        .env_remove("BRAIDREP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn h_on_the_hopf_braid() {
    let out = braidrep(&["h", "1 1", "--starts", "200", "--seed", "5"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["h"], 1);
    assert_eq!(doc["lk"], 1);
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["epsilon"], serde_json::json!([-1, -1]));
    assert_eq!(doc["classes"].as_array().unwrap().len(), 1);
    let class = &doc["classes"][0];
    assert!(class["fingerprint"].is_array());
    assert!(class["sign"].is_number());
    assert!(class["residual"].is_number());
    assert!(class["commutator_margin"].is_number());
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["config"]["starts"], 200);
}

#[test]
fn h_magnitude_grows_with_the_torus_family() {
    let out = braidrep(&["h", "1 1 1 1", "--starts", "300", "--seed", "5"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["h"], 2);
    assert_eq!(doc["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn h_of_the_identity_braid_is_zero() {
    let out = braidrep(&["h", "", "--strands", "2", "--starts", "150"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["h"], 0);
    assert_eq!(doc["classes"].as_array().unwrap().len(), 0);
}

#[test]
fn h_output_is_byte_deterministic() {
    let a = braidrep(&["h", "1 1 2", "--starts", "120", "--seed", "9"]);
    let b = braidrep(&["h", "1 1 2", "--starts", "120", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_distinguish_error_classes() {
    // knot closure: 2
    let out = braidrep(&["h", "1 2"]);
    assert_eq!(out.status.code(), Some(2));
    // parse error: 1
    let out = braidrep(&["h", "1 x"]);
    assert_eq!(out.status.code(), Some(1));
    let out = braidrep(&["lk", "0"]);
    assert_eq!(out.status.code(), Some(1));
    // lk on a knot: 2
    let out = braidrep(&["lk", "1 2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lk_command_reports_the_linking_number() {
    let out = braidrep(&["lk", "1 1 1 1 1 1"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["lk"], 3);
}

#[test]
fn burau_evaluation_and_mod2() {
    let out = braidrep(&["burau", "1", "--t", "-1"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), serde_json::json!([[0, 1], [-1, 2]]));

    let out = braidrep(&["burau", "1", "--mod2"]);
    assert_eq!(stdout_json(&out), serde_json::json!([[0, 1], [1, 0]]));

    let out = braidrep(&["burau", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc[0][0], "0");
    assert_eq!(doc[1][1], "-t^-1 + 1");

    let out = braidrep(&["burau", "2 1 1", "--certificate"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["det_mod2"], 1);
    assert_eq!(doc["is_invertible"], true);
}

#[test]
fn pillowcase_emits_exact_data_and_svg() {
    let dir = std::env::temp_dir().join("braidrep-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let svg_path = dir.join("fig1.svg");
    let out = braidrep(&[
        "pillowcase",
        "--k",
        "1",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["count"], 1);
    assert_eq!(doc["line"]["slope"], 3);
    assert_eq!(doc["common_sign"], 1);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains("<svg"));
    std::fs::remove_file(&svg_path).ok();
}

#[test]
fn verify_runs_a_small_corpus_clean() {
    let out = braidrep(&["verify", "--seed", "7", "--cases", "6", "--starts", "150"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["mismatches"], 0);
    assert_eq!(doc["global_sign"], 1);
}

#[test]
fn env_seed_is_honored() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_braidrep"))
        .args(["h", "1 1", "--starts", "120"])
        .env("BRAIDREP_SEED", "123")
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(doc["seed"], 123);
}

#[test]
fn json_flag_writes_the_same_document() {
    let dir = std::env::temp_dir().join("braidrep-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("hopf.json");
    let out = braidrep(&[
        "h",
        "1 1",
        "--starts",
        "120",
        "--seed",
        "3",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, out.stdout);
    std::fs::remove_file(&path).ok();
}
