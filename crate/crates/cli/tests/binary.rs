use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn g2glue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2glue")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn kummer_fixed_points_pass() {
    let out = g2glue(&["kummer", "fixed-points"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["suite"], "kummer-fixed-points");
    assert_eq!(check(&r, "fixed tori per element")["measured"], serde_json::json!([16, 16, 16, 0, 0, 0, 0]));
    assert_eq!(check(&r, "singular components")["measured"], 12);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fail" && c["law"].as_str().is_some_and(|l| !l.is_empty())));
}

#[test]
fn cone_rates_of_two_forms() {
    let r = report(&g2glue(&["cone", "rates", "--degree", "2", "--from", "-3.99", "--to", "0"]));
    assert_eq!(r["data"]["dimensions"], serde_json::json!({ "-2": 6 }));
    assert_eq!(r["data"]["rates"], serde_json::json!([{ "rate": "-2", "dim": 6, "case": "iii" }]));
    // the lower end is closed
    let r = report(&g2glue(&["cone", "rates", "--degree", "2", "--from", "-4", "--to", "0"]));
    assert_eq!(r["data"]["dimensions"], serde_json::json!({ "-4": 54, "-2": 6 }));
}

#[test]
fn flat_torus_needs_no_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("phi.bin");
    let out = g2glue(&["torus", "solve", "--n", "4", "--eps", "0", "--dump", dump.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["iterations"], 0);
    assert_eq!(r["data"]["residual"], 0.0);
    assert_eq!(r["data"]["distance_to_flat"], 0.0);
    let bytes = std::fs::read(&dump).unwrap();
    assert_eq!(&bytes[..8], &[4, 0, 0, 0, 3, 0, 0, 0]);
    assert_eq!(bytes.len(), 8 + 35 * 4usize.pow(7) * 8);
    // point 0 holds phi_0: coefficient of dx012 is 1
    let first = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    assert_eq!(first, 1.0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[torus]\nn = 4\neps = 0.5\nseed = 9\n").unwrap();
    let r = report(&g2glue(&["torus", "solve", "--config", cfg.to_str().unwrap(), "--eps", "0"]));
    assert_eq!(r["data"]["eps"], 0.0);
    assert_eq!(r["data"]["seed"], 9);
    assert_eq!(r["data"]["n"], 4);
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn output_is_deterministic() {
    for args in [&["eh", "verify", "--samples", "50"][..], &["cone", "oracle"], &["rates", "jk"]] {
        let a = without_timing(report(&g2glue(args)));
        let b = without_timing(report(&g2glue(args)));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(g2glue(&["rates", "jk", "--beta", "-5"]).status.code(), Some(2));
    assert_eq!(g2glue(&["kummer", "torsion", "--beta", "-5"]).status.code(), Some(2));
    assert_eq!(g2glue(&["torus", "solve", "--n", "5"]).status.code(), Some(2));
    assert_eq!(g2glue(&["cone", "rates", "--from", "zero"]).status.code(), Some(2));
    assert_eq!(g2glue(&["torus", "solve", "--config", "/nonexistent/run.cfg"]).status.code(), Some(3));
    let out = g2glue(&["rates", "jk", "--table", "refined"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(check(&report(&out), "torsion exponent")["status"], "fail");
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL torsion exponent"));
    assert_eq!(g2glue(&["rates", "jk", "--table", "naive", "--beta", "-1/10"]).status.code(), Some(0));
}

#[test]
fn reports_are_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = g2glue(&["eh", "decay", "--points", "20", "--out", dir.path().to_str().unwrap(), "--format", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, vec!["eh-decay-decay.csv", "eh-decay.json"]);
    let csv = std::fs::read_to_string(dir.path().join("eh-decay-decay.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,k,value,bound,ratio"));
    assert_eq!(lines.count(), 60);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("eh-decay.json")).unwrap()).unwrap();
    assert_eq!(without_timing(written), without_timing(report(&out)));
    assert!(!Path::new(&dir.path().join("eh-decay.csv")).exists());
}

#[test]
fn thread_cap_is_applied() {
    let out = Command::new(env!("CARGO_BIN_EXE_g2glue")).args(["cone", "index"]).env("G2GLUE_THREADS", "1").output().unwrap();
    assert_eq!(report(&out)["environment"]["threads"], 1);
    let out = Command::new(env!("CARGO_BIN_EXE_g2glue")).args(["cone", "index"]).env("G2GLUE_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
