mod common;

use std::path::{Path, PathBuf};

use common::{cli, read};
use privcache::cli::{EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out: PathBuf = dir.join(name);
    let mut argv = args.to_vec();
    argv.extend(["--out", out.to_str().unwrap()]);
    let code = cli(&argv);
    let text = if out.exists() {
        String::from_utf8(read(&out)).unwrap()
    } else {
        String::new()
    };
    (code, text)
}

#[test]
fn pir_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "tsc2", &["pir", "--scheme", "tsc2"]);
    assert_eq!(code, EXIT_PASS);
    assert!(text.contains("(R_D1, R_D2, F') = (1/2, 1, 1)"), "{text}");
    assert!(text.contains(": pass, tight"), "{text}");

    let (code, text) = run_to(dir.path(), "xor3", &["pir", "--scheme", "xor3"]);
    assert_eq!(code, EXIT_PASS);
    assert!(text.contains("(R_D1, R_D2, F') = (1, 1, 1)"), "{text}");

    let (code, text) = run_to(dir.path(), "cc", &["pir", "--scheme", "cc2pir:man:9:3"]);
    assert_eq!(code, EXIT_PASS);
    assert!(text.contains("(R_D1, R_D2, F') = (3, 3/2, 84)"), "{text}");
    assert!(text.contains("correctness (symbolic"), "{text}");
}

#[test]
fn pir_json() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "pk.json", &["pir", "--scheme", "pk:2:3", "--format", "json"]);
    assert_eq!(code, EXIT_PASS);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rd1"], "1/1");
    assert_eq!(v["udiq"]["marginal_zero"], false);
    assert_eq!(v["in_hypothesis"], false);
    assert!(v["lower_bound"].is_null());
    assert_eq!(v["passed"], true);
}

#[test]
fn audit_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "vu", &["audit", "--scheme", "vu", "--n", "2", "--k", "2", "--t", "1"]);
    assert_eq!(code, EXIT_PASS);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["measured"]["load"], "5/4");
    assert_eq!(v["passed"], true);

    let (code, text) = run_to(dir.path(), "man", &["audit", "--scheme", "man", "--n", "2", "--k", "2", "--t", "1"]);
    assert_eq!(code, EXIT_FAIL);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["demand_privacy"][0]["passed"], false);
    assert_eq!(v["decodability"]["passed"], true);
}

#[test]
fn audit_dump_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    let code = cli(&[
        "audit", "--scheme", "compose:tsc2", "--n", "2", "--k", "2", "--t", "1", "--out",
        dir.path().join("r.json").to_str().unwrap(), "--dump-table", table.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS);
    let text = String::from_utf8(read(&table)).unwrap();
    let header = text.lines().next().unwrap();
    for col in ["d1", "d2", "M1", "M2", "Z1", "Z2", "Xp", "Xm"] {
        assert!(header.split(',').any(|c| c == col), "{header}");
    }
}

#[test]
fn tradeoff_points() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "cor1", &["tradeoff", "--scheme", "cor1", "--n", "2", "--k", "2"]);
    assert_eq!(code, EXIT_PASS);
    assert!(text.starts_with("M_num,M_den,R_num,R_den,scheme,subpacketization\n"));
    assert!(text.contains("\n11,8,3,8,cor1,2\n"), "{text}");

    let (_, text) = run_to(dir.path(), "thm2", &["tradeoff", "--scheme", "thm2", "--n", "2", "--k", "2"]);
    assert!(text.contains("\n1,2,5,4,vu,"), "{text}");

    let (_, text) = run_to(
        dir.path(),
        "small",
        &["tradeoff", "--scheme", "cor_smallN", "--n", "3", "--k", "2", "--t", "1"],
    );
    assert!(text.contains("\n2,1,1,2,cor_smallN,"), "{text}");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "tradeoff", "scheme": "cor1", "n": 2, "k": 2, "format": "csv"}"#).unwrap();
    let (code, from_file) = run_to(dir.path(), "a", &["tradeoff", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
    let (_, from_flags) = run_to(dir.path(), "b", &["tradeoff", "--scheme", "cor1", "--n", "2", "--k", "2"]);
    assert_eq!(from_file, from_flags);

    let (_, overridden) = run_to(dir.path(), "c", &["tradeoff", "--config", cfg.to_str().unwrap(), "--n", "3"]);
    assert_ne!(overridden, from_flags);
    assert!(overridden.contains("\n3,1,0,1,cor1,1\n"), "{overridden}");

    assert_eq!(cli(&["pir", "--config", cfg.to_str().unwrap()]), EXIT_USAGE);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scheme": "cor1", "colour": "blue"}"#).unwrap();
    assert_eq!(cli(&["tradeoff", "--config", bad.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["pir", "--scheme", "nope"]), EXIT_USAGE);
    assert_eq!(cli(&["audit", "--scheme", "vu", "--n", "2", "--k", "2"]), EXIT_USAGE);
    assert_eq!(cli(&["tradeoff", "--scheme", "cor1", "--n", "2", "--k", "2", "--mu", "x"]), EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(cli(&["audit", "--scheme", "vu", "--n", "3", "--k", "3", "--t", "1", "--budget", "10"]), EXIT_USAGE);
    assert_eq!(cli(&["audit", "--scheme", "compose:tsc2", "--n", "3", "--k", "2", "--t", "1"]), EXIT_USAGE);
}

#[test]
fn compare_has_both_curves() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "cmp", &["compare", "--n", "2", "--k", "2", "--format", "json"]);
    assert_eq!(code, EXIT_PASS);
    let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert!(rows.iter().any(|r| r["scheme"] == "vu"));
    assert!(rows.iter().any(|r| r["scheme"] == "cor1"));
}
