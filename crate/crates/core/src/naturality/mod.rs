//! Commutative-square checks, the randomized audit, and exact
//! counterexamples.

mod audit;
mod counterexamples;
mod diagrams;

pub use audit::{
    cell_label, expected_naturality, run_audit, run_trial, summarize_cell, AuditConfig, AuditDims,
    AuditReport, CellSummary, DiagramTrial, DimRange, Expectation, OutputFormat, TrialDims,
    TOOL_VERSION, VIOLATION_FACTOR,
};
pub use counterexamples::{
    counterexample_ols_shear, counterexample_ridge_scaling, CounterexampleResult,
    CounterexampleSet, VIOLATION_THRESHOLD,
};
pub use diagrams::{
    check_diagram, check_index_invariance, check_predictor_dinaturality, check_target_naturality,
};
