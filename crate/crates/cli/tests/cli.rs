use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn ghk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghk")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    ghk(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(ghk(args).stdout).unwrap()
}

#[test]
fn validate_accepts_each_document_kind() {
    for f in ["fx-diamond.json", "fx-z2.json", "fx-free2.json", "fx-n2.json", "fx-swap.json"] {
        assert_eq!(code(&["validate", &fixture(f)]), 0, "{f}");
    }
}

#[test]
fn broken_action_is_an_invalid_document() {
    let out = ghk(&["validate", &fixture("fx-swap-broken.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SS7"));
}

#[test]
fn failing_law_exits_one() {
    assert_eq!(code(&["check", "wfp", &fixture("fx-diamond.json")]), 1);
    assert_eq!(code(&["check", "equidiv", &fixture("fx-diamond.json")]), 1);
    assert_eq!(code(&["check", "levi", &fixture("fx-diamond.json")]), 0);
}

#[test]
fn holding_laws_exit_zero() {
    let swap = fixture("fx-swap.json");
    for law in ["wfp", "equidiv", "cancel-left", "cancel", "r-cond", "levi", "atoms", "lemmas"] {
        assert_eq!(code(&["check", law, &swap, "--bound", "3"]), 0, "{law}");
    }
    assert_eq!(code(&["check", "wfp", &fixture("fx-n2.json"), "--bound", "2,3"]), 0);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&[]), 3);
    assert_eq!(code(&["check", "nope", &fixture("fx-diamond.json")]), 3);
    assert_eq!(code(&["check", "wfp", &fixture("fx-swap.json")]), 3, "bound is required for actions");
    assert_eq!(code(&["check", "wfp", &fixture("fx-n2.json"), "--bound", "1,2,3"]), 3);
    assert_eq!(code(&["roundtrip", &fixture("fx-swap.json"), "--bound", "x"]), 3);
}

#[test]
fn levi_needs_rank_one() {
    assert_eq!(code(&["check", "levi", &fixture("fx-n2.json"), "--bound", "2"]), 3);
}

#[test]
fn unreadable_input_is_invalid() {
    assert_eq!(code(&["validate", "/nonexistent/doc.json"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"hello\": 1}").unwrap();
    assert_eq!(code(&["validate", bad.to_str().unwrap()]), 2);
}

#[test]
fn roundtrip_reports_arrow_count() {
    let out = stdout(&["roundtrip", &fixture("fx-swap.json"), "--bound", "2"]);
    assert_eq!(out.trim(), "theta bijective on 14 arrows");
}

#[test]
fn product_build_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("prod.json");
    let out_s = out.to_str().unwrap();
    assert_eq!(code(&["product", "build", &fixture("fx-swap.json"), "--bound", "2", "-o", out_s]), 0);
    assert_eq!(code(&["check", "wfp", out_s]), 0);
    assert_eq!(code(&["check", "r-cond", out_s]), 0);
}

#[test]
fn decompose_writes_linked_documents() {
    let dir = tempfile::tempdir().unwrap();
    let prod = dir.path().join("prod.json");
    let prod_s = prod.to_str().unwrap();
    assert_eq!(code(&["product", "build", &fixture("fx-swap.json"), "--bound", "3", "-o", prod_s]), 0);
    let out = dir.path().join("dec");
    assert_eq!(code(&["decompose", prod_s, "-o", out.to_str().unwrap()]), 0);
    for f in ["action.json", "skeleton.json", "groupoid.json", "theta.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(code(&["validate", out.join("action.json").to_str().unwrap()]), 0);
    assert_eq!(code(&["validate", out.join("skeleton.json").to_str().unwrap()]), 0);
    assert_eq!(code(&["validate", out.join("groupoid.json").to_str().unwrap()]), 0);
}

#[test]
fn decompose_refuses_diamond() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&["decompose", &fixture("fx-diamond.json"), "-o", dir.path().to_str().unwrap()]), 1);
}

#[test]
fn json_report_records_input_hash() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let path = fixture("fx-diamond.json");
    ghk(&["check", "wfp", &path, "--json", report.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["command"], "check");
    assert_eq!(v["status"], 1);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["results"]["witnesses"][0]["arrow"], "x");
}

#[test]
fn fuzz_is_clean_and_deterministic() {
    let a = stdout(&["fuzz", "--seed", "3", "--count", "30", "--k", "2"]);
    let b = stdout(&["fuzz", "--seed", "3", "--count", "30", "--k", "2"]);
    assert_eq!(a, b);
    assert!(a.contains("0 failure(s)"), "{a}");
}
