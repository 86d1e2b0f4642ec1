use std::process::{Command, Output};

use serde_json::Value;

fn qmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmt"))
        .args(args)
        .env_remove("QMT_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn entries(m: &Value) -> Vec<Vec<i64>> {
    serde_json::from_value(m["matrix"]["entries"].clone()).unwrap()
}

#[test]
fn build_1_1_weight_block() {
    let out = qmt(&["build", "--d1", "1", "--d2", "1"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(
        entries(&doc["weight_matrix"]),
        vec![
            vec![1, 0, 1, 0, 0, 0, 0, 0, 0, -1],
            vec![0, 1, 0, 1, 0, 0, 0, 0, -1, 0],
            vec![0, 0, 0, 0, 1, 0, 1, 0, -1, 0],
            vec![0, 0, 0, 0, 0, 1, 0, 1, 0, -1],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        ]
    );
    assert_eq!(doc["primitive_collections"].as_array().unwrap().len(), 5);
}

#[test]
fn build_dimensions() {
    let doc = json_of(&qmt(&["build", "--d1", "2", "--d2", "1"]));
    assert_eq!(doc["degree"]["r"], 14);
    assert_eq!(doc["degree"]["n"], 7);
    assert_eq!(doc["degree"]["r_minus_n"], 7);
}

#[test]
fn invalid_degree() {
    let out = qmt(&["build", "--d1", "1", "--d2", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json_of(&out);
    assert!(doc["error"].as_str().unwrap().contains("invalid degree"));
}

#[test]
fn verify_passes() {
    for (d1, d2) in [("1", "1"), ("3", "2")] {
        let out = qmt(&["verify", "--d1", d1, "--d2", d2, "--trials", "100"]);
        assert!(out.status.success(), "{d1},{d2}");
        let doc = json_of(&out);
        assert_eq!(doc["passed"], true);
        assert_eq!(doc["min_value_trials"]["succeeded"], 100);
        assert_eq!(doc["simplicial_samples"]["succeeded"], 100);
    }
}

#[test]
fn verify_tampered_fails() {
    let out = qmt(&["verify", "--d1", "1", "--d2", "1", "--tamper"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json_of(&out);
    assert_eq!(doc["passed"], false);
    assert_eq!(doc["exact_sequence"]["passed"], false);
}

#[test]
fn deterministic_output_and_out_file() {
    let args = ["verify", "--d1", "2", "--d2", "2", "--seed", "9", "--trials", "20"];
    let a = qmt(&args);
    let b = qmt(&args);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = qmt(&with_out);
    assert!(c.status.success());
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn solve_with_oracle() {
    let out = qmt(&[
        "solve-amvc",
        "--d1",
        "1",
        "--d2",
        "1",
        "--y",
        r#"[1,2,3,4,5,6,7,8,"1/2",-3]"#,
        "--oracle",
    ]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["x"], serde_json::json!(["3", "4", "7", "8", "23/2"]));
    assert_eq!(doc["oracle_agreement"], true);
    assert!(doc["residuals"].as_array().unwrap().iter().all(|r| r == "0"));
}

#[test]
fn solve_rejects_bad_input() {
    let out = qmt(&["solve-amvc", "--d1", "1", "--d2", "1", "--y", "[1,2]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qmt(&["solve-amvc", "--d1", "1", "--d2", "1", "--y", "[0.5,0,0,0,0,0,0,0,0,0]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_and_budget() {
    let doc = json_of(&qmt(&["count", "--d1", "2", "--d2", "1", "--kmax", "3"]));
    assert_eq!(doc["counts"], serde_json::json!([1, 14, 84, 280]));

    let out = Command::new(env!("CARGO_BIN_EXE_qmt"))
        .args(["count", "--d1", "2", "--d2", "2"])
        .env("QMT_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(json_of(&out)["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn poincare_and_report() {
    let doc = json_of(&qmt(&["poincare", "--d1", "1", "--d2", "1"]));
    assert_eq!(doc["factored"], "(1+t^2)^5");
    assert_eq!(doc["comparison"]["equal"], true);

    let doc = json_of(&qmt(&["report", "--d1", "2", "--d2", "1"]));
    assert_eq!(doc["display"], "(1+t^2)^7");
    assert_eq!(doc["graded_matches_betti"], true);

    let out = qmt(&["report", "--d1", "3", "--d2", "1"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_eq!(doc["factored"], false);
    assert_eq!(doc["betti"][2], 35);
}

#[test]
fn chow_presentation_and_scripts() {
    let doc = json_of(&qmt(&["chow", "--d1", "1", "--d2", "1", "--graded-kmax", "2", "--emit", "plain"]));
    let rel: Vec<&str> = doc["relations"].as_array().unwrap().iter().map(|r| r["text"].as_str().unwrap()).collect();
    assert_eq!(rel, vec!["h1^2", "h2^2", "h3^2", "h4^2", "(-h2-h3+h5)(-h1-h4+h5)"]);
    assert_eq!(doc["graded_dimensions"], serde_json::json!([1, 5, 10]));
    assert!(doc["script"].as_str().unwrap().contains("(-h2-h3+h5)(-h1-h4+h5)"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chow.m2");
    let out = qmt(&["chow", "--d1", "2", "--d2", "1", "--emit", "macaulay2", "--script", path.to_str().unwrap()]);
    assert!(out.status.success());
    let script = std::fs::read_to_string(&path).unwrap();
    assert!(script.contains("R = QQ[h1,h2,h3,h4,h5,h6,h7];"));

    let out = qmt(&["chow", "--d1", "1", "--d2", "1", "--emit", "maple"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emit_formats() {
    let out = qmt(&["emit", "--d1", "1", "--d2", "1", "--what", "weight", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("label,a_0^1,a_1^1,a_0^2"));
    assert_eq!(text.lines().count(), 6);

    let out = qmt(&["emit", "--d1", "1", "--d2", "1", "--what", "vertex", "--format", "pretty"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("u_(1,0)"));

    let out = qmt(&["build", "--d1", "1", "--d2", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moduli_loci() {
    let doc = json_of(&qmt(&["moduli", "--d1", "1", "--d2", "1"]));
    assert_eq!(doc["torus_rank"], 5);
    let loci: Vec<&str> = doc["excluded_locus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["display"].as_str().unwrap())
        .collect();
    assert_eq!(loci.last(), Some(&"{(u_(0,1), u_(1,0)) = (0,0)}"));
}
