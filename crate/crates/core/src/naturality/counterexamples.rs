//! Two exact, hand-sized witnesses of non-naturality.
//!
//! * Shear: with one example `x = [1, 0]`, `y = [1]`, every `f = [1, a]ᵀ`
//!   fits exactly. Any rule that picks one of them (here the minimum-norm
//!   one) fails to commute with the shear `[[1, k], [0, 1]]`.
//! * Scaling: scalar ridge with `x = [b]`, `y = [1]` gives
//!   `f = b / (b² + λ)`; rescaling the predictor by `c` gives
//!   `bc / (b²c² + λ)`, which equals `f / c` only when `λ = 0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::{min_norm_ols_fit, ridge_fit, ridge_objective, sse, LinearModel};
use crate::categories::{
    act_on_predictors, model_precompose_predictor, Axis, CategoryKind, Morphism,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Residual above which a counterexample counts as a demonstrated violation.
pub const VIOLATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleResult {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub original: LinearModel,
    pub transformed: LinearModel,
    /// Headline residual of the counterexample (absolute).
    pub residual: f64,
    /// `‖ξ·f′ − f‖_F`, the predictor-square defect (absolute).
    pub dinaturality_residual: f64,
    pub objective_original: f64,
    pub objective_transformed: f64,
    /// Closed-form values the computed quantities should reproduce.
    pub closed_form: BTreeMap<String, f64>,
}

impl CounterexampleResult {
    pub fn violation_exhibited(&self) -> bool {
        self.residual > VIOLATION_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSet {
    pub ols_shear: CounterexampleResult,
    pub ridge_scaling: CounterexampleResult,
}

impl CounterexampleSet {
    pub fn run(k: f64, b: f64, c: f64, lambda: f64) -> Result<Self> {
        Ok(Self {
            ols_shear: counterexample_ols_shear(k)?,
            ridge_scaling: counterexample_ridge_scaling(b, c, lambda)?,
        })
    }

    pub fn all_exhibited(&self) -> bool {
        self.ols_shear.violation_exhibited() && self.ridge_scaling.violation_exhibited()
    }
}

fn scalar(v: f64) -> Matrix {
    Matrix::new(1, 1, vec![v]).expect("finite scalar")
}

fn require_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config {
            field: name,
            message: format!("must be finite, got {v}"),
        })
    }
}

/// Minimum-norm least squares before and after the shear `[[1, k], [0, 1]]`
/// on the single example `x = [1, 0]`, `y = [1]`.
///
/// `k = 0` is accepted and yields the identity square (residual 0).
pub fn counterexample_ols_shear(k: f64) -> Result<CounterexampleResult> {
    require_finite("k", k)?;
    let d = Dataset::new(Matrix::from_rows(&[[1.0, 0.0]])?, scalar(1.0))?;
    let shear = Morphism::new(
        CategoryKind::FinVecIso,
        Axis::Predictor,
        Matrix::from_rows(&[[1.0, k], [0.0, 1.0]])?,
    )?;
    let sheared = act_on_predictors(&d, &shear)?;

    let f = min_norm_ols_fit(&d);
    let f_prime = min_norm_ols_fit(&sheared);
    let pulled_back = model_precompose_predictor(&shear, &f_prime)?;
    let defect = pulled_back
        .coefficients()
        .sub(f.coefficients())?
        .frobenius_norm();

    let denom = 1.0 + k * k;
    let closed_form = BTreeMap::from([
        ("residual".to_string(), k.abs() / denom),
        ("f_prime_0".to_string(), 1.0 / denom),
        ("f_prime_1".to_string(), k / denom),
        ("sse".to_string(), 0.0),
    ]);
    Ok(CounterexampleResult {
        name: "ols_shear".into(),
        parameters: BTreeMap::from([("k".to_string(), k)]),
        objective_original: sse(&d, &f)?,
        objective_transformed: sse(&sheared, &f_prime)?,
        original: f,
        transformed: f_prime,
        residual: defect,
        dinaturality_residual: defect,
        closed_form,
    })
}

/// Scalar ridge regression before and after rescaling the predictor by `c`.
///
/// The headline residual is `|f′ − f/c|`; the predictor-square defect
/// `|c·f′ − f|` is reported alongside it.
pub fn counterexample_ridge_scaling(b: f64, c: f64, lambda: f64) -> Result<CounterexampleResult> {
    require_finite("b", b)?;
    require_finite("c", c)?;
    if b == 0.0 {
        return Err(Error::Config {
            field: "b",
            message: "must be nonzero".into(),
        });
    }
    if c == 0.0 {
        return Err(Error::Config {
            field: "c",
            message: "must be nonzero".into(),
        });
    }
    let d = Dataset::new(scalar(b), scalar(1.0))?;
    let scale = Morphism::new(CategoryKind::FinVecIso, Axis::Predictor, scalar(c))?;
    let scaled = act_on_predictors(&d, &scale)?;

    let f = ridge_fit(&d, lambda)?;
    let f_prime = ridge_fit(&scaled, lambda)?;
    let fv = f.coefficients()[(0, 0)];
    let fpv = f_prime.coefficients()[(0, 0)];
    let pulled_back = model_precompose_predictor(&scale, &f_prime)?;
    let defect = pulled_back
        .coefficients()
        .sub(f.coefficients())?
        .frobenius_norm();

    let closed_f = b / (b * b + lambda);
    let closed_f_prime = b * c / (b * b * c * c + lambda);
    let closed_form = BTreeMap::from([
        ("f".to_string(), closed_f),
        ("f_prime".to_string(), closed_f_prime),
        ("f_over_c".to_string(), closed_f / c),
        (
            "residual".to_string(),
            (closed_f_prime - closed_f / c).abs(),
        ),
    ]);
    Ok(CounterexampleResult {
        name: "ridge_scaling".into(),
        parameters: BTreeMap::from([
            ("b".to_string(), b),
            ("c".to_string(), c),
            ("lambda".to_string(), lambda),
        ]),
        objective_original: ridge_objective(&d, &f, lambda)?,
        objective_transformed: ridge_objective(&scaled, &f_prime, lambda)?,
        original: f,
        transformed: f_prime,
        residual: (fpv - fv / c).abs(),
        dinaturality_residual: defect,
        closed_form,
    })
}
