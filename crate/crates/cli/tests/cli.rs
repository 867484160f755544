use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapcert"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn payload<'a>(report: &'a Value, kind: &str) -> &'a Value {
    report["payloads"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["kind"] == kind)
        .unwrap_or_else(|| panic!("no {kind} payload in {report}"))
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_all_on_the_barrier_path() {
    let out = run(&[
        "verify",
        "--all",
        fixture("barrier_path.prob").to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = json(&out);
    assert_eq!(report["tool"], "gapcert");
    assert!(report["input_digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
    assert_eq!(payload(&report, "certificates")["data"]["holds"], true);
}

#[test]
fn cheeger_on_the_three_vertex_path() {
    let out = run(&[
        "cheeger",
        "--exhaustive",
        fixture("p3.prob").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let report = json(&out);
    let h = find_number(&report, "h").unwrap_or_else(|| panic!("no h in {text}"));
    assert!((h - 1.0).abs() <= 1e-12, "h = {h}");
}

/// First number stored under `key` anywhere in the document.
fn find_number(v: &Value, key: &str) -> Option<f64> {
    match v {
        Value::Object(map) => map
            .get(key)
            .and_then(Value::as_f64)
            .or_else(|| map.values().find_map(|x| find_number(x, key))),
        Value::Array(items) => items.iter().find_map(|x| find_number(x, key)),
        _ => None,
    }
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["gap", "/nonexistent/missing.prob"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.prob");
    std::fs::write(&path, "n 3\nkind combinatorial\ne 0 0 1.0\n").unwrap();
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_directory_in_name_order() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["p3.prob", "k2.prob", "c4.prob"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let out = run(&["verify", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (c4, k2, p3) = (
        text.find("c4.prob").unwrap(),
        text.find("k2.prob").unwrap(),
        text.find("p3.prob").unwrap(),
    );
    assert!(c4 < k2 && k2 < p3);
    assert!(!text.contains("notes.txt"));
}

#[test]
fn routing_the_grid_fixture() {
    let out = run(&["route", fixture("grid_crossing.prob").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.5"), "{text}");
}

#[test]
fn baa_sim_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let out = run(&[
        "baa-sim",
        "--family",
        "two-level",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let trace = std::fs::read_to_string(&csv).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("tau,h_hat,gap_bound,delta_tau,fidelity"));
    assert!(lines.count() > 5);
}

#[test]
fn baa_sim_gap_collapse_exits_one() {
    let out = run(&["baa-sim", "--family", "path", "--gamma-min", "0.05"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    assert_eq!(run(&["selftest"]).status.code(), Some(0));
}

#[test]
fn reports_are_byte_stable() {
    let c4 = fixture("c4.prob");
    let args = ["verify", "--all", c4.to_str().unwrap()];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let sim = ["baa-sim", "--family", "two-level", "--samples", "2000"];
    assert_eq!(run(&sim).stdout, run(&sim).stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "--out",
        path.to_str().unwrap(),
        "gap",
        fixture("k2.prob").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
}
