use std::process::{Command, Output};

use gkm::weightgraph::{GraphJson, WeightHypergraph};

fn gkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkm"))
        .args(args)
        .output()
        .expect("run gkm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gkm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn obstruct_br32_finds_witness() {
    let o = gkm(&["obstruct", "br", "3", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("NOT TORIC (obstruction found)"));
    assert!(s.contains("transcript:"));
    assert!(s.contains("E_{000,0}^{001,0}"));
}

#[test]
fn obstruct_br23_is_consistent() {
    let o = gkm(&["obstruct", "br", "2", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no obstruction found (consistent with toric)"));
}

#[test]
fn obstruct_reports_inconclusive_budget() {
    let o = gkm(&[
        "obstruct",
        "r",
        "7",
        "1",
        "--max-growth",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["inconclusive"].as_u64().unwrap() > 0);
    assert!(v["witness"].is_null());
}

#[test]
fn verdicts_never_claim_toric() {
    for args in [
        ["br", "2", "2"],
        ["r", "2", "2"],
        ["r", "3", "3"],
        ["br", "4", "1"],
    ] {
        let mut a = vec!["obstruct"];
        a.extend(args);
        let s = stdout(&gkm(&a)).to_lowercase();
        assert!(
            !s.contains("is toric") && !s.contains("verdict: toric"),
            "{s}"
        );
    }
}

#[test]
fn betti_r22() {
    let o = gkm(&["betti", "r", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 4 4 1\n");
    assert_eq!(stdout(&gkm(&["betti", "br", "3", "2"])), "1 4 7 4 1\n");
}

#[test]
fn family_formats() {
    let dot = stdout(&gkm(&["family", "br", "3", "2", "--format", "dot"]));
    assert!(dot.starts_with("graph \"br:3,2\" {"));
    assert!(dot.contains("\"000,0\""));
    let json = stdout(&gkm(&["family", "r", "2", "2", "--format", "json"]));
    let j: GraphJson = serde_json::from_str(&json).unwrap();
    let g = WeightHypergraph::from_json(&j).unwrap();
    assert_eq!(g.num_vertices(), 10);
    let text = stdout(&gkm(&["family", "bf", "3"]));
    assert!(text.contains("8 vertices") && text.contains("validation: ok"));
}

#[test]
fn export_to_file() {
    let path = tmp("br32.json");
    let o = gkm(&["export", "br", "3", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let j: GraphJson = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(WeightHypergraph::from_json(&j).unwrap().num_vertices(), 17);
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(gkm(&["family", "br", "0", "3"]).status.code(), Some(2));
    assert_eq!(gkm(&["family", "xx", "1"]).status.code(), Some(2));
    assert_eq!(
        gkm(&["reproduce", "thm1.2", "2", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(gkm(&["betti", "r", "1"]).status.code(), Some(2));
    assert_eq!(gkm(&["obstruct"]).status.code(), Some(2));
}

#[test]
fn cohomology_relations() {
    let s = stdout(&gkm(&["cohomology", "r", "2", "2", "--relations"]));
    assert!(s.contains("graded ranks 1 4 4 1"));
    assert!(s.contains("annihilator ideal"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&gkm(&[
        "cohomology",
        "br",
        "3",
        "2",
        "--relations",
        "--format",
        "json",
    ])))
    .unwrap();
    assert_eq!(v["graded_ranks"], serde_json::json!([1, 4, 7, 4, 1]));
    assert!(!v["relations"].as_array().unwrap().is_empty());
}

#[test]
fn toric_presets_check() {
    for p in ["br21", "br22", "r22", "r13"] {
        let o = gkm(&["toric", "check", "--preset", p]);
        assert_eq!(o.status.code(), Some(0), "{p}: {}", stdout(&o));
        assert!(stdout(&o).contains("isomorphic to the"));
    }
}

#[test]
fn toric_check_file_round_trip() {
    let path = tmp("r13.json");
    std::fs::write(&path, stdout(&gkm(&["toric", "preset", "r13"]))).unwrap();
    let o = gkm(&["toric", "check", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn toric_check_rejects_singular_minor() {
    let path = tmp("bad.json");
    let bad = r#"{"dim":2,"facets":4,"vertices":[[0,2],[0,3],[1,2],[1,3]],"lambda":[[1,1,0,0],[0,0,2,1]]}"#;
    std::fs::write(&path, bad).unwrap();
    assert_eq!(
        gkm(&["toric", "check", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reproduce_text() {
    let o = gkm(&["reproduce", "thm1.3", "3", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("000,11"));
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gkm"))
        .args(["obstruct", "br", "3", "2"])
        .env("GKM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
