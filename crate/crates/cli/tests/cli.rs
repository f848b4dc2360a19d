use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn natreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_natreg"))
        .args(args)
        .output()
        .expect("spawn natreg")
}

fn write_csv(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn parse_coefficients(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

fn stderr_value(out: &Output, key: &str) -> f64 {
    let err = String::from_utf8_lossy(&out.stderr);
    err.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {err}"))
        .parse()
        .unwrap()
}

#[test]
fn fit_ridge_scalar_example() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(&dir, "d.csv", "x,y\n1,1\n");
    let out = natreg(&[
        "fit",
        "--data",
        &data,
        "--predictors",
        "1",
        "--targets",
        "1",
        "--algorithm",
        "ridge",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let f = parse_coefficients(&String::from_utf8(out.stdout.clone()).unwrap());
    assert!((f[0][0] - 0.5).abs() <= 1e-12);
    assert!((stderr_value(&out, "ridge_objective") - 0.5).abs() <= 1e-12);
}

#[test]
fn fit_ols_exact_fixture_to_file() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(&dir, "d.csv", "1,0,1\n0,1,2\n1,1,3\n");
    let out_path = dir.path().join("f.csv");
    let out = natreg(&[
        "fit",
        "--data",
        &data,
        "--predictors",
        "2",
        "--targets",
        "1",
        "--algorithm",
        "ols",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let f = parse_coefficients(&fs::read_to_string(&out_path).unwrap());
    assert!(
        (f[0][0] - 1.0).abs() <= 1e-12 && (f[1][0] - 2.0).abs() <= 1e-12,
        "{f:?}"
    );
    assert!(stderr_value(&out, "sse") <= 1e-20);
}

#[test]
fn fit_rank_deficient_ols_exits_one_but_minnorm_succeeds() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(&dir, "d.csv", "1,0,1\n");
    let base = [
        "fit",
        "--data",
        &data,
        "--predictors",
        "2",
        "--targets",
        "1",
        "--algorithm",
    ];
    let out = natreg(&[&base[..], &["ols"]].concat());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank"));
    let out = natreg(&[&base[..], &["minnorm-ols"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let f = parse_coefficients(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(f, vec![vec![1.0], vec![0.0]]);
}

#[test]
fn fit_usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let good = write_csv(&dir, "good.csv", "1,1\n2,2\n");
    let out = natreg(&[
        "fit",
        "--data",
        &good,
        "--predictors",
        "1",
        "--targets",
        "1",
        "--algorithm",
        "ridge",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write_csv(&dir, "bad.csv", "1,2\n3,oops\n");
    let out = natreg(&[
        "fit",
        "--data",
        &bad,
        "--predictors",
        "1",
        "--targets",
        "1",
        "--algorithm",
        "ols",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));

    let missing = dir.path().join("none.csv");
    let out = natreg(&[
        "fit",
        "--data",
        missing.to_str().unwrap(),
        "--predictors",
        "1",
        "--targets",
        "1",
        "--algorithm",
        "ols",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = natreg(&[
        "fit",
        "--data",
        &good,
        "--predictors",
        "2",
        "--targets",
        "1",
        "--algorithm",
        "ols",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_small_run_is_deterministic() {
    let args = ["audit", "--trials", "1", "--seed", "7"];
    let a = natreg(&args);
    let b = natreg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("36/36 cells agree"));
}

#[test]
fn audit_rejects_unknown_category() {
    let out = natreg(&["audit", "--categories", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    let out = natreg(&["audit", "--axes", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
    let out = natreg(&["audit", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

fn audit_json(dir: &Path, extra: &[&str]) -> Value {
    let path = dir.join("report.json");
    let mut args = vec![
        "audit",
        "--trials",
        "4",
        "--seed",
        "11",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = natreg(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn audit_json_schema() {
    let dir = TempDir::new().unwrap();
    let report = audit_json(
        dir.path(),
        &[
            "--axes",
            "predictor,target",
            "--categories",
            "euc_mono,finvec",
        ],
    );
    for key in [
        "tool_version",
        "master_seed",
        "config",
        "cells",
        "counterexamples",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let cells = report["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2 * 2 * 2);
    for cell in cells {
        for key in [
            "algorithm",
            "lambda",
            "axis",
            "category",
            "expected",
            "trials",
            "max_residual",
            "violations",
            "agrees_with_paper",
        ] {
            assert!(cell.get(key).is_some(), "cell missing {key}");
        }
        assert_eq!(cell["trials"], 4);
        if cell["algorithm"] == "ols" {
            assert!(cell["lambda"].is_null());
        } else {
            assert_eq!(cell["lambda"], 1.0);
        }
    }
    assert!(report["counterexamples"]["ols_shear"]["residual"].is_number());
}

#[test]
fn audit_text_and_json_agree() {
    let dir = TempDir::new().unwrap();
    let report = audit_json(dir.path(), &["--axes", "index"]);
    let text = natreg(&["audit", "--trials", "4", "--seed", "11", "--axes", "index"]);
    let text = String::from_utf8(text.stdout).unwrap();
    for cell in report["cells"].as_array().unwrap() {
        let row = text
            .lines()
            .find(|l| {
                let cols: Vec<&str> = l.split_whitespace().collect();
                cols.len() >= 9
                    && cols[0] == cell["algorithm"]
                    && cols[2] == cell["axis"]
                    && cols[3] == cell["category"]
            })
            .unwrap_or_else(|| panic!("no row for {cell}"));
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(
            cols[5].parse::<u64>().unwrap(),
            cell["trials"].as_u64().unwrap()
        );
        assert_eq!(
            cols[6].parse::<u64>().unwrap(),
            cell["violations"].as_u64().unwrap()
        );
        assert_eq!(
            cols[7].parse::<f64>().unwrap(),
            cell["max_residual"].as_f64().unwrap()
        );
    }
}

#[test]
fn counterexamples_exit_codes() {
    assert_eq!(natreg(&["counterexamples"]).status.code(), Some(0));
    assert_eq!(
        natreg(&["counterexamples", "--k", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        natreg(&["counterexamples", "--c", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        natreg(&["counterexamples", "--lambda", "1e-12"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        natreg(&["counterexamples", "--c", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn counterexamples_json() {
    let out = natreg(&["counterexamples", "--format", "json", "--k", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ridge = &v["ridge_scaling"];
    assert!((ridge["residual"].as_f64().unwrap() - 0.15).abs() <= 1e-12);
    assert_eq!(v["ols_shear"]["parameters"]["k"], -2.0);
    assert!(v["ols_shear"]["residual"].as_f64().unwrap() > 1e-6);
}
