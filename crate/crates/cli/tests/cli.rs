//! End-to-end runs of the `wtrv` binary.

use std::path::Path;
use std::process::{Command, Output};

fn wtrv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtrv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid json")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn write_wk_sample(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("sample.csv");
    let out = wtrv(&[
        "simulate",
        "--dist",
        "weighted_kumaraswamy(a=2,b=13,c=6)",
        "--n",
        "400",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    stdout(&out);
    path
}

#[test]
fn construct_exponential_square_weight_is_gamma_two() {
    let out = wtrv(&[
        "construct",
        "--dist",
        "exponential(lambda=1)",
        "--weight",
        "power(c=2)",
        "--points",
        "50",
    ]);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["x", "pdf", "cdf", "sf"]);
    assert_eq!(rows.len(), 50);
    for r in rows {
        let x = r[0];
        assert!((r[1] - x * (-x).exp()).abs() < 1e-6, "pdf at {x}");
        assert!((r[2] - (1.0 - (1.0 + x) * (-x).exp())).abs() < 1e-6, "cdf at {x}");
    }
}

#[test]
fn unknown_distribution_is_a_usage_error() {
    let out = wtrv(&["construct", "--dist", "nope(a=1)", "--weight", "linear"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wtrv(&["construct", "--dist", "exponential(lambda=1", "--weight", "linear"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wtrv(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theorem_without_inputs_is_a_usage_error() {
    let out = wtrv(&["verify-theorem", "thm8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--w1"));
}

#[test]
fn divergent_expected_weight_exits_one_with_message() {
    let out = wtrv(&["construct", "--dist", "pareto_lomax(alpha=1.5)", "--weight", "exp_shift_sq"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not integrable"), "{err}");
}

#[test]
fn ratio_curve_is_csv_with_header() {
    let out = wtrv(&["verify-theorem", "thm9-example7", "--emit-ratio", "--points", "20"]);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["x", "ratio"]);
    assert_eq!(rows.len(), 20);
    // f_{Y_w}/f_{X_w} = e^{-2x}(e - 2)/(1 - x) on (0, 1).
    for r in rows {
        let expected = (-2.0 * r[0]).exp() * (std::f64::consts::E - 2.0) / (1.0 - r[0]);
        assert!((r[1] - expected).abs() < 1e-8 * expected.max(1.0));
    }
}

#[test]
fn fixture_verdict_reports_hypotheses_and_conclusion() {
    let v = json(&wtrv(&["verify-theorem", "thm9-example7"]));
    assert_eq!(v["theorem"], "thm9");
    assert_eq!(v["hypotheses_hold"], true);
    assert_eq!(v["conclusion_holds"], true);
    assert_eq!(v["consistent"], true);
}

#[test]
fn check_order_reports_all_four_orders() {
    let v = json(&wtrv(&[
        "check-order",
        "--x",
        "exponential(lambda=2)",
        "--y",
        "exponential(lambda=1)",
    ]));
    let verdicts = v.as_array().unwrap();
    assert_eq!(verdicts.len(), 4);
    assert!(verdicts.iter().all(|o| o["holds_on_grid"] == true));

    let v = json(&wtrv(&[
        "check-order",
        "--x",
        "exponential(lambda=1)",
        "--y",
        "exponential(lambda=2)",
        "--order",
        "st",
    ]));
    assert_eq!(v[0]["holds_on_grid"], false);
}

#[test]
fn table1_audit_passes_every_row() {
    let v = json(&wtrv(&["table1-audit"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for r in rows {
        assert_eq!(r["passed"], true, "{r}");
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_wk_sample(dir.path());
    let args = ["fit", path.to_str().unwrap(), "--model", "kw", "--seed", "11"];
    let a = stdout(&wtrv(&args));
    let b = stdout(&wtrv(&args));
    assert_eq!(a, b);
}

#[test]
fn report_chains_describe_fit_and_gof() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_wk_sample(dir.path());
    let v = json(&wtrv(&["report", path.to_str().unwrap(), "--tests", "ks,ad"]));
    assert_eq!(v["statistics"]["n"], 400);
    let models = v["models"].as_array().unwrap();
    let names: Vec<&str> = models.iter().map(|m| m["fit"]["model"].as_str().unwrap()).collect();
    assert_eq!(names, ["beta", "kw", "wk"]);
    for m in models {
        assert_eq!(m["gof"]["tests"].as_array().unwrap().len(), 2);
        // Two observations sit on the ends of the normalized range.
        assert_eq!(m["fit"]["n_likelihood"], 398);
    }
}

#[test]
fn fit_writes_density_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_wk_sample(dir.path());
    let density = dir.path().join("density.csv");
    let out = wtrv(&[
        "fit",
        path.to_str().unwrap(),
        "--model",
        "beta",
        "--emit-density",
        density.to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert!(stdout(&out).contains("beta"));
    let (header, rows) = csv_rows(&std::fs::read_to_string(density).unwrap());
    assert_eq!(header, ["x", "pdf", "z", "pdf_z"]);
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[1] >= 0.0));
}

#[test]
fn describe_skips_missing_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rain.csv");
    std::fs::write(&path, "Year,Rain\n2001,10\n2002,NA\n2003,30\n2004,\n2005,20\n").unwrap();
    let v = json(&wtrv(&[
        "describe",
        path.to_str().unwrap(),
        "--column",
        "rain",
        "--year-column",
        "year",
    ]));
    assert_eq!(v["skipped"], 2);
    assert_eq!(v["statistics"]["n"], 3);
    assert_eq!(v["statistics"]["mean"], 20.0);
}

#[test]
fn missing_column_is_a_module_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "a\n1\n").unwrap();
    let out = wtrv(&["describe", path.to_str().unwrap(), "--column", "b"]);
    assert_eq!(out.status.code(), Some(1));
}
