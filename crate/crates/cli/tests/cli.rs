use std::path::PathBuf;
use std::process::{Command, Output};

fn solvbase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solvbase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("solvbase-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn same_seed_gives_identical_certificates() {
    let args = ["verify", "thm-irred-1-q7", "--seed", "11", "--format", "json"];
    let a = solvbase(&args);
    let b = solvbase(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn known_good_cases_exit_zero() {
    for name in ["thm-irred-5", "sym8-wreath"] {
        let o = solvbase(&["verify", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("verdict\tverified"));
    }
}

#[test]
fn displayed_gl29_conjugators_are_refuted() {
    let o = solvbase(&["verify", "lemma-rtdiagfield-2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("refuted"));
}

#[test]
fn written_certificate_verifies_again() {
    let path = scratch("irred5.json");
    let o = solvbase(&["verify", "thm-irred-5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = solvbase(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = solvbase(&["verify", path.to_str().unwrap(), "--format", "json"]);
    let certs: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(certs[0]["case"], "thm-irred-5");
    assert_eq!(certs[0]["verified"], "verified");
}

#[test]
fn corrupted_certificate_is_a_parse_error() {
    let good = scratch("good.json");
    assert_eq!(solvbase(&["verify", "sym8-wreath", "--out", good.to_str().unwrap()]).status.code(), Some(0));
    let text = std::fs::read_to_string(&good).unwrap();
    let bad = scratch("bad.json");
    std::fs::write(&bad, &text[..text.len() / 2]).unwrap();
    let o = solvbase(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn tampered_claim_is_refuted() {
    let good = scratch("tamper.json");
    assert_eq!(solvbase(&["verify", "thm-irred-5", "--out", good.to_str().unwrap()]).status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    v[0]["claim"]["b"] = serde_json::json!(2);
    std::fs::write(&good, v.to_string()).unwrap();
    assert_eq!(solvbase(&["verify", good.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn empty_row_list_gives_empty_report() {
    let o = solvbase(&["reproduce", "irred", "--rows", "", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().map(Vec::len), Some(0));
}

#[test]
fn list_shows_anchors() {
    let o = solvbase(&["--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("sym8-wreath\t")).expect("sym8-wreath listed");
    assert!(line.split('\t').nth(1).is_some_and(|a| !a.is_empty()));
}

#[test]
fn bad_usage_exits_three() {
    assert_eq!(solvbase(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(solvbase(&["verify", "no-such-scenario"]).status.code(), Some(3));
    assert_eq!(solvbase(&["construct", "eq-adef"]).status.code(), Some(3));
    assert_eq!(solvbase(&["reproduce", "nope"]).status.code(), Some(3));
    assert_eq!(solvbase(&["--help"]).status.code(), Some(0));
}

#[test]
fn constructions_print() {
    let o = solvbase(&["construct", "eq-igrek", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A = [1,2,1;0,1,2;0,0,1]"));

    let o = solvbase(&["construct", "lemma-diag-z", "--n", "4", "--m", "2", "--q", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["q"], 5);
    assert!(v["z"].as_str().is_some());

    let o = solvbase(&["construct", "quaternion-normalizer", "--q", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order:"));
}

#[test]
fn bounds_tables() {
    let o = solvbase(&["bounds", "sinbase", "--nmax", "5", "--qmax", "4", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = rows.as_array().unwrap().iter().find(|r| r["n"] == 4 && r["q"] == 2 && r["denominator"] == "q-1").unwrap();
    assert_eq!(r["a"], "60");

    let o = solvbase(&["bounds", "gluck-manz", "--n", "4", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("below the bound"));

    let o = solvbase(&["bounds", "case2-n5", "--qmax", "4"]);
    assert!(stdout(&o).contains("4\t3200005/8388608\ttrue"));
}
