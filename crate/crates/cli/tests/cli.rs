use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpagerank")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| match v.as_str() {
        Some("inf") => f64::INFINITY,
        other => panic!("not a number: {other:?}"),
    })
}

#[test]
fn two_cycle_scores_are_equal() {
    let v = json(&["rank-classical", "--graph", &fixture("two_cycle.tsv")]);
    let rows = v["pagerank"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((f(&r["score"]) - 0.5).abs() < 1e-12);
    }
    assert_eq!(rows[0]["node"], 1);
}

#[test]
fn dangling_chain_ranking() {
    let v = json(&["rank-classical", "--graph", &fixture("dangling_chain.tsv")]);
    let rows = v["pagerank"].as_array().unwrap();
    assert_eq!(rows[0]["node"], 2);
    assert!((f(&rows[0]["score"]) - 0.649123).abs() < 1e-6);
    assert!((f(&rows[1]["score"]) - 0.350877).abs() < 1e-6);
}

#[test]
fn missing_file_exits_2_naming_path() {
    let out = run(&["rank-classical", "--graph", "/no/such/graph.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/graph.tsv"));
}

#[test]
fn malformed_graph_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tsv");
    std::fs::write(&path, "1\t2\n2\tx\n").unwrap();
    let out = run(&["rank-classical", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn non_convergence_exits_3() {
    let out = run(&["rank-classical", "--graph", &fixture("four_node.tsv"), "--max-iter", "1", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dimension_cap_exits_4() {
    let out = run(&["rank-quantum", "--graph", &fixture("four_node.tsv"), "--dim-cap", "8"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unbalanced_perturbation_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"order_terms":[{"order":1,"entries":[{"i":1,"j":1,"value":0.1}]}]}"#).unwrap();
    let out = run(&["perturb", "--graph", &fixture("two_cycle.tsv"), "--perturbation", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn inadmissible_chi_exits_6() {
    let out = run(&[
        "perturb",
        "--graph",
        &fixture("two_cycle.tsv"),
        "--perturbation",
        &fixture("two_cycle_g1.json"),
        "--chi",
        "-1.0",
    ]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn norm_variant_at_m0_sums_to_projection_weight() {
    let v = json(&["rank-quantum", "--graph", &fixture("four_node.tsv"), "--m", "0", "--variant", "norm"]);
    let total: f64 = v["quantum"].as_array().unwrap().iter().map(|r| f(&r["iq"])).sum();
    // The uniform state lies in the span of the |ψ_j⟩, inside the dynamical subspace.
    assert!((total - 1.0).abs() < 1e-10, "{total}");
}

#[test]
fn mixing_bound_halves_when_t_doubles() {
    let v = json(&["rank-quantum", "--graph", &fixture("two_cycle.tsv"), "--m", "5,10", "--nodes", "1"]);
    let rows = v["quantum"].as_array().unwrap();
    let (b5, b10) = (f(&rows[0]["mixing_bound"]), f(&rows[1]["mixing_bound"]));
    assert!((b10 - b5 / 2.0).abs() < 1e-15);
    assert!(rows.iter().all(|r| (f(&r["average"]) - f(&r["limit"])).abs() <= f(&r["mixing_bound"])));
}

#[test]
fn zero_perturbation_report() {
    let v = json(&[
        "perturb",
        "--graph",
        &fixture("two_cycle.tsv"),
        "--perturbation",
        &fixture("zero.json"),
        "--order",
        "3",
    ]);
    for row in v["iq_series"].as_array().unwrap() {
        if row["order"].as_u64().unwrap() > 0 {
            assert_eq!(f(&row["value"]), 0.0);
        }
    }
    assert!(v["t_series"].as_array().unwrap().iter().all(|r| f(&r["value"]) == 0.0));
    let s = &v["summary"][0];
    for key in ["r0", "r1", "r2"] {
        assert!(f(&s[key]).is_infinite());
    }
    assert!(v["truncation"].as_array().unwrap().iter().all(|r| f(&r["abs_error"]) < 1e-12));
}

#[test]
fn two_cycle_first_order_t_entry() {
    let v = json(&["perturb", "--graph", &fixture("two_cycle.tsv"), "--perturbation", &fixture("two_cycle_g1.json")]);
    let t12 = v["t_series"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["i"] == 1 && r["j"] == 2 && r["order"] == 1)
        .unwrap();
    assert!((f(&t12["value"]) + 0.05).abs() < 1e-15);
    let rows = v["truncation"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["within_bound"] == true));
}

#[test]
fn output_is_deterministic_and_formats_agree() {
    let args = ["perturb", "--graph", &fixture("k3.tsv"), "--perturbation", &fixture("k3_breaking.json"), "--m", "1,2"];
    let a = run(&[&args[..], &["--format", "csv"]].concat());
    let b = run(&[&args[..], &["--format", "csv"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let v = json(&args);
    let csv_text = String::from_utf8(a.stdout).unwrap();
    let csv_rows: Vec<&str> = csv_text.lines().filter(|l| l.starts_with("iq_series,")).collect();
    let json_rows = v["iq_series"].as_array().unwrap();
    assert_eq!(csv_rows.len(), json_rows.len());
    for (line, row) in csv_rows.iter().zip(json_rows) {
        let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(value, f(&row["value"]));
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rank.csv");
    let out = run(&[
        "rank-classical",
        "--graph",
        &fixture("dangling_chain.tsv"),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("table,rank,node,score\npagerank,1,2,6.49122807"));
}

#[test]
fn psi0_from_file() {
    // |ψ_1⟩ of the 2-cycle: amplitudes √g_1k at index (1, k).
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    std::fs::write(&path, format!("[{}, {}, 0, 0]", 0.075f64.sqrt(), 0.925f64.sqrt())).unwrap();
    let v = json(&[
        "rank-quantum",
        "--graph",
        &fixture("two_cycle.tsv"),
        "--psi0",
        path.to_str().unwrap(),
        "--m",
        "0",
        "--variant",
        "norm",
    ]);
    let total: f64 = v["quantum"].as_array().unwrap().iter().map(|r| f(&r["iq"])).sum();
    assert!((total - 1.0).abs() < 1e-10);

    std::fs::write(&path, "[1, 0, 0]").unwrap();
    let out = run(&["rank-quantum", "--graph", &fixture("two_cycle.tsv"), "--psi0", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn two_cycle_m1_is_symmetric() {
    // Swapping the two nodes is a symmetry of the walk and of the uniform state.
    let v = json(&["rank-quantum", "--graph", &fixture("two_cycle.tsv"), "--m", "1", "--variant", "norm"]);
    let rows = v["quantum"].as_array().unwrap();
    assert!((f(&rows[0]["iq"]) - 0.5).abs() < 1e-12);
    assert!((f(&rows[1]["iq"]) - 0.5).abs() < 1e-12);
}
