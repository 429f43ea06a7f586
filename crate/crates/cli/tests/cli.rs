//! End-to-end runs of the `ctwb` binary: exit codes, JSON shape, the
//! closure-cap override and parse-error locations.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ctwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctwb")).args(args).env_remove("CTWB_CLOSURE_CAP").output().unwrap()
}

fn bundled(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "examples", name].iter().collect();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn bundled_files_check_as_media() {
    for name in ["bit.ct", "trit.ct", "spekkens.ct"] {
        let out = ctwb(&["check", &bundled(name), "--medium", "--json"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json(&out)["verdict"], "pass");
    }
}

#[test]
fn medium_is_the_default_mode() {
    let out = ctwb(&["check", &bundled("bit.ct")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--medium"));
}

#[test]
fn spekkens_superinfo_fails_on_intersection() {
    let out = ctwb(&["check", &bundled("spekkens.ct"), "--superinfo", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["verdict"], "fail");
    let findings = report["findings"].as_array().unwrap();
    assert!(findings.iter().any(|f| f["name"].as_str().unwrap().contains("intersection")));
}

#[test]
fn bit_superinfo_is_a_medium_without_witness() {
    let out = ctwb(&["check", &bundled("bit.ct"), "--superinfo", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let findings = json(&out)["findings"].as_array().unwrap().clone();
    let status = |name: &str| findings.iter().find(|f| f["name"] == name).unwrap()["status"].clone();
    assert_eq!(status("information medium"), "pass");
    assert_eq!(status("superinformation medium"), "fail");
}

#[test]
fn malformed_file_exits_with_location() {
    let path = scratch("broken.ct", "theory t\nstates: a b\nmap m: a->b\n");
    let out = ctwb(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.ct:3:"), "{err}");
    assert!(err.contains('b'), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let out = ctwb(&["check", "/nonexistent/theory.ct"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn closure_cap_env_makes_search_inconclusive() {
    let out = Command::new(env!("CARGO_BIN_EXE_ctwb"))
        .args(["check", &bundled("spekkens.ct"), "--json"])
        .env("CTWB_CLOSURE_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "inconclusive");

    let bad = Command::new(env!("CARGO_BIN_EXE_ctwb"))
        .args(["check", &bundled("bit.ct")])
        .env("CTWB_CLOSURE_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn argument_commands() {
    let run = json(&ctwb(&["argument", "run", "--json"]));
    assert_eq!(run["verdict"], "pass");
    let checks = run["findings"].as_array().unwrap();
    assert_eq!(checks.iter().filter(|f| f["status"] == "pass").count(), 8);

    let weak = json(&ctwb(&["argument", "weak", "--json"]));
    assert_eq!(weak["verdict"], "pass");
    let skipped: Vec<_> = weak["findings"].as_array().unwrap().iter().filter(|f| f["status"] == "skipped").collect();
    assert_eq!(skipped.len(), 1);
    assert_eq!(skipped[0]["name"], "r_orthogonal");

    let nogo = json(&ctwb(&["argument", "no-go", "--json"]));
    assert_eq!(nogo["findings"][0]["witness"].as_f64().unwrap(), 0.0);
}

#[test]
fn protocol_commands() {
    let out = ctwb(&["protocol", "teleport", "--trials", "5", "--seed", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["seed"], 7);
    assert!(report["findings"][0]["witness"].as_f64().unwrap() >= 1.0 - 1e-10);

    let dense = json(&ctwb(&["protocol", "superdense", "--json"]));
    let decoded = dense["findings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["name"].as_str().unwrap().ends_with("decoded") && f["status"] == "pass");
    assert_eq!(decoded.count(), 4);

    let swap = ctwb(&["protocol", "swap-demo"]);
    assert_eq!(swap.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&swap.stdout).contains("allowed measurements diverge"));
}

#[test]
fn default_seed_is_42() {
    let report = json(&ctwb(&["protocol", "teleport", "--trials", "2", "--json"]));
    assert_eq!(report["seed"], 42);
}

#[test]
fn unknown_protocol_is_a_usage_error() {
    let out = ctwb(&["protocol", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_matches_verdict() {
    for args in [
        vec!["check", "bit", "--superinfo", "--json"],
        vec!["check", "trit", "--json"],
        vec!["argument", "run", "--json"],
        vec!["protocol", "swap-demo", "--json"],
    ] {
        let out = ctwb(&args);
        let expected = match json(&out)["verdict"].as_str().unwrap() {
            "pass" => 0,
            "fail" => 1,
            _ => 3,
        };
        assert_eq!(out.status.code(), Some(expected), "{args:?}");
    }
}
