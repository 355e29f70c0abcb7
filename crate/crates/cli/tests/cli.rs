use std::process::{Command, Output};

use serde_json::Value;

const EXP: &str = r#"{"family":"exponential","params":{"lambda":1}}"#;
const UNIT: &str = r#"{"family":"uniform","params":{"a":0,"b":1}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_kind(out: &Output) -> String {
    json(out)["error"]["kind"].as_str().unwrap_or_default().to_string()
}

#[test]
fn measure_rows_and_divergence() {
    let out = run(&["measure", "--dist", EXP, "--measure", "weighted_extropy"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["command"], "measure");
    assert_eq!(doc["rows"][0]["value"].as_f64(), Some(-0.125));

    let beta = r#"{"family":"beta","params":{"alpha":1,"beta":0.4}}"#;
    let out = run(&["measure", "--dist", beta, "--measure", "weighted_extropy"]);
    let doc = json(&out);
    assert_eq!(doc["rows"][0]["value"], "-inf");
    assert_eq!(doc["rows"][0]["diverged"], true);
}

#[test]
fn validation_errors_exit_2_with_a_document() {
    let bad_family = r#"{"family":"weibull","params":{}}"#;
    let out = run(&["measure", "--dist", bad_family]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "validation");
    let message = json(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(message.contains("exponential") && message.contains("pareto"), "{message}");

    let out = run(&["measure", "--dist", EXP, "--measure", "entropy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"]["message"].as_str().unwrap().contains("weighted_extropy"));

    let out = run(&["measure", "--dist", EXP, "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["measure", "--dist", r#"{"family":"exponential","params":{"lambda":-1}}"#]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");

    let out = run(&["claims", "--dist", EXP, "--claims", "no_such_claim"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curve_reports_per_row_errors_and_continues() {
    let out = run(&[
        "curve",
        "--dist",
        UNIT,
        "--measure",
        "weighted_past_extropy",
        "--t",
        "0.25,0.5,1.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    for r in &rows[..2] {
        assert!((r["value"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    }
    assert!(rows[2]["message"].as_str().unwrap().contains("domain"));
}

#[test]
fn curve_default_grid_is_ordered() {
    let out = run(&["curve", "--dist", EXP, "--measure", "weighted_residual_extropy"]);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 20);
    let ts: Vec<f64> = rows.iter().map(|r| r["t"].as_f64().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
    assert!((ts[0] + (0.99f64).ln()).abs() < 1e-9);
}

#[test]
fn geometric_and_linear_grids() {
    let out = run(&["curve", "--dist", EXP, "--measure", "residual_extropy", "--grid", "geometric:0.1:10:3"]);
    let ts: Vec<f64> = json(&out)["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["t"].as_f64().unwrap())
        .collect();
    assert_eq!(ts.len(), 3);
    assert!((ts[1] - 1.0).abs() < 1e-12 && ts[2] == 10.0);

    for bad in ["1:2", "2:1:5", "geometric:0:1:5", "0:1:one"] {
        let out = run(&["curve", "--dist", EXP, "--measure", "residual_extropy", "--grid", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["curve", "--dist", EXP, "--measure", "weighted_residual_extropy", "--t", "0.3,1,2"];
    let doc = json(&run(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let text = String::from_utf8(run(&csv_args).stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "value").unwrap();
    for (line, row) in lines.zip(doc["rows"].as_array().unwrap()) {
        let csv_value: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        let json_value = row["value"].as_f64().unwrap();
        assert!((csv_value - json_value).abs() <= 1e-11 * json_value.abs());
    }
}

#[test]
fn dist_from_file_and_output_file() {
    let dir = std::env::temp_dir().join(format!("extropy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("u13.json");
    std::fs::write(&spec, r#"{"family":"uniform","params":{"a":1,"b":3}}"#).unwrap();
    let out_path = dir.join("out.csv");
    let out = run(&[
        "measure",
        "--dist",
        spec.to_str().unwrap(),
        "--measure",
        "weighted_extropy",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",-0.5,"), "{text}");

    let missing = dir.join("missing.json");
    let out = run(&["measure", "--dist", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn claims_summary_and_strict_exit() {
    let out = run(&["claims", "--dist", EXP, "--claims", "sum_bound,residual_bound", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["summary"]["violated"], 1);
    assert_eq!(doc["summary"]["holds"], 1);
    let residual = &doc["rows"][1];
    assert_eq!(residual["claim_id"], "residual_bound");
    assert!((residual["gap"].as_f64().unwrap() - 0.125).abs() < 1e-8);

    let out = run(&["claims", "--dist", EXP, "--claims", "sum_bound", "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["claims", "--dist", UNIT, "--claims", "sum_bound", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn constancy_needs_a_family() {
    let out = run(&["claims", "--dist", EXP, "--claims", "constancy"]);
    let doc = json(&out);
    assert_eq!(doc["rows"][0]["verdict"], "indeterminate");

    let out = run(&[
        "claims",
        "--dist",
        EXP,
        "--claims",
        "constancy",
        "--hazard-family",
        "pareto:3",
        "--t",
        "1.5,2,4",
    ]);
    let row = &json(&out)["rows"][0];
    assert_eq!(row["verdict"], "holds");
    assert!((row["details"]["predicted_constant"].as_f64().unwrap() + 0.75).abs() < 1e-15);
}

#[test]
fn bivariate_and_mc_rerun() {
    let bb = r#"{"family":"bivariate_beta","params":{"alpha":1,"beta":1,"gamma":1}}"#;
    let doc = json(&run(&["bivariate", "--dist", bb]));
    assert!((doc["rows"][0]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let args = ["mc", "--dist", UNIT, "--measure", "weighted_extropy", "--samples", "5000", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["mc", "--dist", UNIT, "--measure", "weighted_extropy", "--samples", "5000", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn transform_rejects_bad_maps() {
    let out = run(&["transform", "--dist", EXP, "--transform", "affine:-1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["transform", "--dist", EXP, "--transform", "cube"]);
    assert_eq!(out.status.code(), Some(2));
}
