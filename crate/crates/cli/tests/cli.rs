use std::process::{Command, Output};

use serde_json::Value;

fn egp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn compute_reproduces_a_catalog_row() {
    let out = egp(&["compute", "--graph", "catalog:P_5_1", "--bound", "41", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["primes"], serde_json::json!([3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]));
    assert_eq!(v["residues"], serde_json::json!([1, 1, 1, 5, 12, 16, 11, 13, 7, 1, 25, 9]));
}

#[test]
fn algorithms_and_special_vertex_agree_on_the_command_line() {
    let base = json(&egp(&["compute", "--graph", "family:wheel:4", "--bound", "13", "--json"]));
    for extra in [["--algorithm", "direct"], ["--algorithm", "reduced"], ["--special", "2"]] {
        let mut args = vec!["compute", "--graph", "family:wheel:4", "--bound", "13", "--json"];
        args.extend(extra);
        assert_eq!(json(&egp(&args))["residues"], base["residues"], "{extra:?}");
    }
}

#[test]
fn exported_graph_reads_back() {
    let dir = std::env::temp_dir().join(format!("egp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p41.graph");
    let out = egp(&["catalog", "P4,1", "--export"]);
    assert!(out.status.success());
    std::fs::write(&path, &out.stdout).unwrap();
    let from_file = json(&egp(&["compute", "--graph", &format!("file:{}", path.display()), "--bound", "41", "--json"]));
    let from_catalog = json(&egp(&["compute", "--graph", "catalog:P_4_1:completed", "--bound", "41", "--json"]));
    assert_eq!(from_file["residues"], from_catalog["residues"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suites_and_tables_exit_cleanly() {
    for args in [
        vec!["verify", "--suite", "symmetry"],
        vec!["verify", "--suite", "closed-form", "--bound", "13"],
        vec!["table", "--appendix", "b", "--bound", "23"],
        vec!["table", "--appendix", "c", "--bound", "71"],
    ] {
        let out = egp(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn verify_reports_json() {
    let v = json(&egp(&["verify", "--suite", "closed-form", "--json"]));
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 9);
}

#[test]
fn point_count_report() {
    let out = egp(&["pointcount", "--graph", "family:banana:2", "-p", "5", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["count"], 9);
    assert_eq!(v["gperm"], 4);
    assert_eq!(v["signs"]["derived_relation_holds"], true);
}

#[test]
fn modular_form_comparison_exit_codes() {
    let ok = egp(&["modform-compare", "--graph", "catalog:P_3_1", "--eta", "-1 * eta(4)^6"]);
    assert!(ok.status.success());
    let wrong = egp(&["modform-compare", "--graph", "catalog:P_4_1", "--eta", "eta(2)^12", "--json"]);
    assert_eq!(wrong.status.code(), Some(1));
    assert_eq!(json(&wrong)["first_mismatch"], 3);
    let paired = egp(&["modform-compare", "--graph", "catalog:P_6_3", "--pairing"]);
    assert!(paired.status.success());
}

#[test]
fn closed_form_from_the_catalog() {
    let v = json(&egp(&["closed-form", "--expr", "catalog:P_7_5", "--bound", "13", "--json"]));
    let row = json(&egp(&["compute", "--graph", "catalog:P_7_5", "--bound", "13", "--json"]));
    assert_eq!(v["primes"], row["primes"]);
    let tree = json(&egp(&["closed-form", "--family", "tree", "--size", "4", "--bound", "7", "--json"]));
    assert_eq!(tree["residues"], serde_json::json!([1, 2, 4, 6]));
}

#[test]
fn errors_exit_with_two() {
    for args in [
        vec!["compute", "--graph", "catalog:P_9_9"],
        vec!["compute", "--graph", "nowhere"],
        vec!["compute", "--graph", "family:wheel:2"],
        vec!["compute", "--graph", "file:/nonexistent/graph"],
    ] {
        let out = egp(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn table_output_is_independent_of_thread_count() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_egp"))
            .args(["table", "--appendix", "A", "--bound", "13", "--json"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn ryser_cap_is_named_when_exceeded() {
    let out = Command::new(env!("CARGO_BIN_EXE_egp"))
        .args(["compute", "--graph", "family:wheel:5", "--bound", "13", "--algorithm", "direct"])
        .env("EGP_RYSER_CAP", "4")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Ryser") && text.contains("cap is 4"), "{text}");
    assert_eq!(out.status.code(), Some(1));
}
