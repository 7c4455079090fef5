use std::process::{Command, Output};

use serde_json::Value;

fn specbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn thm1_on_c6() {
    let out = specbound(&["bounds", "--thm", "1", "--graph", "cycle:6", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let lhs = v["verdict"]["lhs"].as_f64().unwrap();
    let rhs = v["verdict"]["rhs"].as_f64().unwrap();
    assert!((lhs - 3f64.sqrt()).abs() < 1e-9);
    assert!((rhs - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["instance"]["n"], 6);
}

#[test]
fn petersen_robust_certified() {
    let out = specbound(&["robust", "--graph", "petersen", "--r", "1", "--s", "1", "--d", "2", "--dtilde", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["status"], "certified-exhaustive");
}

#[test]
fn refuted_robustness_exits_one() {
    let out = specbound(&["robust", "--graph", "cycle:6", "--r", "1", "--s", "1", "--d", "2", "--dtilde", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["certificate"]["status"], "refuted");
}

#[test]
fn malformed_edge_list_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "# header\n3 2\n0 1\n1 two\n").unwrap();
    let out = specbound(&["bounds", "--thm", "1", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn file_inputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = specbound(&["gen", "--graph", "gnp:9:0.5", "--seed", "3", "--weights", "uniform:0.5:2"]);
    assert_eq!(gen.status.code(), Some(0));
    let json_path = dir.path().join("g.json");
    std::fs::write(&json_path, &gen.stdout).unwrap();
    let edges = specbound(&["gen", "--graph", json_path.to_str().unwrap(), "--format", "edges"]);
    let edge_path = dir.path().join("g.txt");
    std::fs::write(&edge_path, &edges.stdout).unwrap();
    let back = specbound(&["gen", "--graph", edge_path.to_str().unwrap()]);
    assert_eq!(back.stdout, gen.stdout);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["bounds", "--thm", "3", "--graph", "gnp:10:0.5", "--seed", "7", "--r", "2"];
    let a = specbound(&args);
    let b = specbound(&args);
    assert_eq!(a.stdout, b.stdout);
    let gen = ["gen", "--graph", "gnp:10:0.5", "--seed", "7"];
    assert_eq!(specbound(&gen).stdout, specbound(&gen).stdout);
    assert_ne!(specbound(&gen).stdout, specbound(&["gen", "--graph", "gnp:10:0.5", "--seed", "8"]).stdout);
}

#[test]
fn exit_codes_by_error_kind() {
    // n·d odd
    assert_eq!(specbound(&["gen", "--graph", "random-regular:7:3"]).status.code(), Some(2));
    // no connected graph with p = 0
    assert_eq!(specbound(&["gen", "--graph", "gnp:8:0", "--connected"]).status.code(), Some(3));
    // not regular
    assert_eq!(specbound(&["bounds", "--thm", "alon-boppana", "--graph", "path:6"]).status.code(), Some(2));
    // hoory needs c
    assert_eq!(specbound(&["bounds", "--thm", "hoory", "--graph", "petersen"]).status.code(), Some(2));
    assert_eq!(specbound(&["bounds", "--thm", "thm9", "--graph", "petersen"]).status.code(), Some(2));
}

#[test]
fn asymptotic_only_never_fails_the_run() {
    let out = specbound(&["bounds", "--thm", "normalized-alon-boppana", "--graph", "petersen", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().nth(1).unwrap().contains("false"));
}

#[test]
fn thm2_on_petersen_is_vacuous_at_r1() {
    let out = specbound(&["bounds", "--thm", "2", "--graph", "petersen", "--r", "1", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["verdict"]["flags"].as_array().unwrap().iter().any(|f| f == "vacuous"));
    assert_eq!(v["certificate"]["status"], "certified-exhaustive");
}

#[test]
fn unravel_and_spectrum() {
    let out = specbound(&["unravel", "--graph", "cycle:7", "--v", "0", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tree"]["n"], 7);
    let rho = v["spectral_radius"].as_f64().unwrap();
    assert!((rho - 2.0 * (std::f64::consts::PI / 8.0).cos()).abs() < 1e-9);
    let out = specbound(&["spectrum", "--graph", "complete:5", "--matrix", "laplacian"]);
    let ev = json(&out)["spectrum"]["eigenvalues"].as_array().unwrap().clone();
    assert!(ev[0].as_f64().unwrap().abs() < 1e-9);
    assert!((ev[4].as_f64().unwrap() - 1.25).abs() < 1e-9);
}

#[test]
fn prooflab_identities_hold() {
    let out = specbound(&["prooflab", "--graph", "petersen", "--r", "2", "--g", "degrees"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn suite_negative_control_is_an_input_error() {
    let out = specbound(&["suite", "--negative-control"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly positive"));
}
