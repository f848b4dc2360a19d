//! Ordinary least squares and ridge regression from their closed forms,
//! together with randomized checks of which data transformations each fit
//! commutes with.
//!
//! Data follow a row convention throughout: a dataset holds an N×p
//! predictor matrix and an N×q target matrix, and a model is the p×q
//! matrix `f` predicting `x·f`.

pub mod algorithms;
pub mod categories;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod naturality;
pub mod report;

pub use algorithms::{
    min_norm_ols_fit, ols_fit, ols_oracle_fit, ridge_fit, ridge_objective, sse, AlgorithmSpec,
    Learner, LinearModel,
};
pub use categories::{sample_morphism, Axis, CategoryKind, Morphism};
pub use dataset::{synth_dataset, Dataset};
pub use error::{Error, Result};
pub use linalg::{Matrix, SeedState};
pub use naturality::{run_audit, AuditConfig, AuditReport, CounterexampleSet};
