use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abelpn")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn assert_envelope(v: &Value, command: &str, module: &str) {
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], command);
    assert_eq!(v["provenance"]["module"], module);
    assert!(v["provenance"]["quantity"].is_string());
}

#[test]
fn criteria_with_bauer_value() {
    let out = run(&["--format", "json", "criteria", "--n", "1", "--type", "4", "--m-source", "bauer"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_envelope(&v, "criteria", "criteria");
    assert_eq!(v["result"]["verdict"], "criterion_met");
    assert_eq!(v["result"]["intersection_number"], "16");
}

#[test]
fn criteria_with_computed_value() {
    let torus = fixture("elliptic_d3.json");
    let out = run(&["--format", "json", "criteria", "--m-source", "computed", "--input", &torus]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["m_source"], "computed");
    assert_eq!(v["result"]["type"], serde_json::json!([3]));
}

#[test]
fn criteria_dimension_mismatch_is_a_validation_failure() {
    let out = run(&["--format", "json", "criteria", "--n", "2", "--type", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "dimensions");
    let out = run(&["--format", "json", "criteria", "--type", "2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "polarization_type");
}

#[test]
fn lemma31_on_the_square_curve() {
    let out = run(&["--format", "json", "lemma31", "--input", &fixture("torus_square.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_envelope(&v, "lemma31", "diagonal_product");
    let r = &v["result"];
    assert!((r["lhs"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((r["rhs"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(r["rel_err"].as_f64().unwrap() < 1e-9);
}

#[test]
fn table_has_forty_rows_and_one_flagged_crossover() {
    let out = run(&["--format", "json", "table", "--n-max", "40"]);
    assert!(out.status.success());
    let rows: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert_envelope(r, "table", "criteria");
    }
    let flagged: Vec<u64> =
        rows.iter().filter(|r| r["result"]["crossover"] == true).map(|r| r["result"]["n"].as_u64().unwrap()).collect();
    assert_eq!(flagged, vec![24]);

    let text = run(&["table", "--n-max", "40"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert_eq!(text.lines().count(), 42);
    assert!(text.ends_with("crossover: n = 24\n"));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let out = run(&["--format", "json", "bs", "--input", "{\"type\": [1],\n \"tau\": [[{\"re\": 0, \"im\": 1}]"]);
    assert_eq!(out.status.code(), Some(2));
    let e = &json(&out)["error"];
    assert_eq!(e["kind"], "validation");
    assert_eq!(e["invariant"], "json_syntax");
    assert_eq!(e["line"], 2);
    assert!(e["column"].as_u64().unwrap() > 0);

    let text = run(&["bs", "--input", "{\"type\": [1"]);
    assert_eq!(text.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&text.stderr).contains("line 1, column"));
}

#[test]
fn unknown_fields_and_bad_tori_are_rejected() {
    let out = run(&["--format", "json", "bs", "--input", r#"{"type":[1],"tau":[[{"re":0,"im":1}]],"scale":2}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "json_syntax");

    let out = run(&["--format", "json", "bs", "--input", r#"{"type":[1],"tau":[[{"re":0,"im":-1}]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "imag_positive_definite");

    let out = run(&["--format", "json", "bs", "--input", "/nonexistent/torus.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "input_file");
}

#[test]
fn validate_names_the_failing_invariant() {
    let ok = run(&["--format", "json", "validate", "--input", &fixture("surface_square.json")]);
    assert!(ok.status.success());
    let v = json(&ok);
    assert_envelope(&v, "validate", "torus_core");
    assert_eq!(v["result"]["all_passed"], true);

    let asym = r#"{"type":[1,1],"tau":[[{"re":0,"im":1},{"re":0.1,"im":0}],[{"re":0,"im":0},{"re":0,"im":1}]]}"#;
    let bad = run(&["--format", "json", "validate", "--input", asym]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["result"]["first_failure"], "symmetry");
}

#[test]
fn relative_invariant_of_an_axis() {
    let out = run(&[
        "--format",
        "json",
        "rel-bs",
        "--input",
        &fixture("surface_square.json"),
        "--subtorus",
        &fixture("axis.json"),
    ]);
    assert!(out.status.success());
    assert!((json(&out)["result"]["length_sq"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let unsaturated = r#"{"sublattice":[[2,0,0,0],[0,0,1,0]]}"#;
    let out =
        run(&["--format", "json", "rel-bs", "--input", &fixture("surface_square.json"), "--subtorus", unsaturated]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["invariant"], "sublattice_saturated");
}

#[test]
fn tube_and_federer_reports() {
    let torus = fixture("surface_square.json");
    let axis = fixture("axis.json");
    let out = run(&[
        "--format",
        "json",
        "tube",
        "--input",
        &torus,
        "--subtorus",
        &axis,
        "--curve",
        &fixture("orthogonal_line.json"),
        "--radius",
        "0.4",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_envelope(&v, "tube", "tube_volume");
    let vol = v["result"]["volume"].as_f64().unwrap();
    assert!((vol - std::f64::consts::PI * 0.16).abs() < 1e-6);
    assert_eq!(v["result"]["holds"], true);

    let too_wide = run(&[
        "--format",
        "json",
        "tube",
        "--input",
        &torus,
        "--subtorus",
        &axis,
        "--curve",
        &fixture("cusp.json"),
        "--radius",
        "0.6",
    ]);
    assert_eq!(too_wide.status.code(), Some(2));
    assert_eq!(json(&too_wide)["error"]["invariant"], "radius_within_injectivity");

    let out = run(&["--format", "json", "federer", "--curve", &fixture("parabola.json"), "--radius", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["multiplicity"], 1);
    assert_eq!(v["result"]["holds"], true);
}

#[test]
fn rho2_is_deterministic_per_seed() {
    let torus = fixture("elliptic_d3.json");
    let a = run(&["--format", "json", "--seed", "7", "rho2", "--input", &torus]);
    let b = run(&["--format", "json", "--seed", "7", "rho2", "--input", &torus]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_envelope(&v, "rho2", "theta_rho2");
    assert_eq!(v["result"]["numerical_rank"], 6);
    assert_eq!(v["result"]["seed_used"], 7);

    let d2 = json(&run(&["--format", "json", "rho2", "--input", &fixture("elliptic_d2.json")]));
    assert_eq!(d2["result"]["surjective"], false);
    assert_eq!(d2["result"]["verdict"], "not surjective at working precision");
}

#[test]
fn every_json_report_round_trips() {
    let torus = fixture("torus_square.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", "--input", &torus],
        vec!["bs", "--input", &torus],
        vec!["lemma31", "--input", &torus],
        vec!["criteria", "--type", "1,2"],
        vec!["rho2", "--input", &torus],
    ];
    for args in cases {
        let mut full = vec!["--format", "json"];
        full.extend(&args);
        let first = run(&full);
        assert!(first.status.success(), "{args:?}");
        let v = json(&first);
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again.as_bytes(), first.stdout.as_slice(), "{args:?}");
        assert_eq!(run(&full).stdout, first.stdout);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["criteria", "--m-source", "computed"]).status.code(), Some(2));
}
