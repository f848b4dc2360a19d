//! Machine-readable (JSON) and human-readable (text) audit reports.
//!
//! The JSON layout is stable: keys are emitted in declaration order and
//! floats use shortest round-trip formatting, so parsing a report and
//! serializing it again reproduces the same bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::categories::{Axis, CategoryKind};
use crate::naturality::{
    AuditConfig, AuditReport, CellSummary, CounterexampleResult, CounterexampleSet, Expectation,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonCell {
    pub algorithm: String,
    pub lambda: Option<f64>,
    pub axis: Axis,
    pub category: CategoryKind,
    pub expected: Expectation,
    pub trials: usize,
    pub max_residual: f64,
    pub violations: usize,
    pub agrees_with_paper: bool,
}

impl From<&CellSummary> for JsonCell {
    fn from(c: &CellSummary) -> Self {
        Self {
            algorithm: c.algorithm.name().to_string(),
            lambda: c.algorithm.lambda(),
            axis: c.axis,
            category: c.category,
            expected: c.expected,
            trials: c.trials(),
            max_residual: c.max_residual,
            violations: c.fail_count,
            agrees_with_paper: c.agrees_with_paper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub tool_version: String,
    pub master_seed: u64,
    pub config: AuditConfig,
    pub cells: Vec<JsonCell>,
    pub counterexamples: Option<CounterexampleSet>,
}

impl From<&AuditReport> for JsonReport {
    fn from(r: &AuditReport) -> Self {
        Self {
            tool_version: r.tool_version.clone(),
            master_seed: r.master_seed,
            config: r.config.clone(),
            cells: r.cells.iter().map(JsonCell::from).collect(),
            counterexamples: r.counterexamples.clone(),
        }
    }
}

impl JsonReport {
    pub fn all_agree(&self) -> bool {
        self.cells.iter().all(|c| c.agrees_with_paper)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn audit_json(report: &AuditReport) -> String {
    to_json(&JsonReport::from(report))
}

fn expected_str(e: Expectation) -> &'static str {
    match e {
        Expectation::Natural => "natural",
        Expectation::NotNatural => "not_natural",
    }
}

fn lambda_str(l: Option<f64>) -> String {
    l.map_or_else(|| "-".to_string(), |l| format!("{l:e}"))
}

/// One aligned row per cell, each ending in PASS or FAIL.
pub fn audit_text(report: &AuditReport) -> String {
    let json = JsonReport::from(report);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "natreg {} naturality audit  master_seed={}  trials/cell={}  base_tolerance={:e}",
        json.tool_version,
        json.master_seed,
        json.config.trials_per_cell,
        json.config.base_tolerance
    );
    let _ = writeln!(
        out,
        "{:<12} {:>8} {:<10} {:<11} {:<12} {:>6} {:>10} {:>24}  result",
        "algorithm",
        "lambda",
        "axis",
        "category",
        "expected",
        "trials",
        "violations",
        "max_residual"
    );
    for c in &json.cells {
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:<10} {:<11} {:<12} {:>6} {:>10} {:>24e}  {}",
            c.algorithm,
            lambda_str(c.lambda),
            c.axis.as_str(),
            c.category.as_str(),
            expected_str(c.expected),
            c.trials,
            c.violations,
            c.max_residual,
            if c.agrees_with_paper { "PASS" } else { "FAIL" }
        );
    }
    let agreeing = json.cells.iter().filter(|c| c.agrees_with_paper).count();
    let _ = writeln!(
        out,
        "{agreeing}/{} cells agree with the expected classification",
        json.cells.len()
    );
    if let Some(cx) = &json.counterexamples {
        out.push('\n');
        out.push_str(&counterexamples_text(cx));
    }
    out
}

fn counterexample_text(out: &mut String, r: &CounterexampleResult) {
    let params: Vec<String> = r
        .parameters
        .iter()
        .map(|(k, v)| format!("{k}={v:e}"))
        .collect();
    let _ = writeln!(
        out,
        "{} ({}): residual={:e} dinaturality_residual={:e} objective_original={:e} objective_transformed={:e}  {}",
        r.name,
        params.join(" "),
        r.residual,
        r.dinaturality_residual,
        r.objective_original,
        r.objective_transformed,
        if r.violation_exhibited() { "VIOLATION" } else { "NO VIOLATION" }
    );
    let original: Vec<String> = r
        .original
        .coefficients()
        .as_slice()
        .iter()
        .map(|v| format!("{v:e}"))
        .collect();
    let transformed: Vec<String> = r
        .transformed
        .coefficients()
        .as_slice()
        .iter()
        .map(|v| format!("{v:e}"))
        .collect();
    let _ = writeln!(
        out,
        "  f=[{}] f'=[{}]",
        original.join(", "),
        transformed.join(", ")
    );
    let closed: Vec<String> = r
        .closed_form
        .iter()
        .map(|(k, v)| format!("{k}={v:e}"))
        .collect();
    let _ = writeln!(out, "  closed form: {}", closed.join(" "));
}

pub fn counterexamples_text(set: &CounterexampleSet) -> String {
    let mut out = String::from("counterexamples\n");
    counterexample_text(&mut out, &set.ols_shear);
    counterexample_text(&mut out, &set.ridge_scaling);
    out
}
