//! Closed-form least squares and ridge regression, their objectives, and a
//! gradient-descent oracle used to cross-check the closed forms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, solve_spd, svd, Matrix};

/// A learned linear map `x ↦ x·f` with `f` of shape p×q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    f: Matrix,
}

impl LinearModel {
    pub fn new(f: Matrix) -> Self {
        Self { f }
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.f
    }

    pub fn into_coefficients(self) -> Matrix {
        self.f
    }

    pub fn p(&self) -> usize {
        self.f.rows()
    }

    pub fn q(&self) -> usize {
        self.f.cols()
    }

    /// Predictions for the rows of `x_new` (k×p), giving k×q.
    pub fn predict(&self, x_new: &Matrix) -> Result<Matrix> {
        if x_new.cols() != self.p() {
            return Err(Error::dims(
                "predict",
                format!(
                    "inputs have {} columns, model expects {}",
                    x_new.cols(),
                    self.p()
                ),
            ));
        }
        x_new.matmul(&self.f)
    }
}

/// Anything that turns a dataset into a linear model. The diagram checkers
/// are written against this trait.
pub trait Learner {
    fn fit(&self, d: &Dataset) -> Result<LinearModel>;
}

impl<F> Learner for F
where
    F: Fn(&Dataset) -> Result<LinearModel>,
{
    fn fit(&self, d: &Dataset) -> Result<LinearModel> {
        self(d)
    }
}

/// The closed set of algorithms audited by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    Ols,
    Ridge { lambda: f64 },
    MinNormOls,
}

impl AlgorithmSpec {
    pub fn ridge(lambda: f64) -> Result<Self> {
        let spec = AlgorithmSpec::Ridge { lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgorithmSpec::Ridge { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidHyperparameter(format!(
                    "ridge lambda must be positive, got {lambda}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Ols => "ols",
            AlgorithmSpec::Ridge { .. } => "ridge",
            AlgorithmSpec::MinNormOls => "minnorm-ols",
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            AlgorithmSpec::Ridge { lambda } => Some(lambda),
            _ => None,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lambda() {
            Some(l) => write!(f, "ridge(lambda={l:e})"),
            None => f.write_str(self.name()),
        }
    }
}

impl Learner for AlgorithmSpec {
    fn fit(&self, d: &Dataset) -> Result<LinearModel> {
        match *self {
            AlgorithmSpec::Ols => ols_fit(d),
            AlgorithmSpec::Ridge { lambda } => ridge_fit(d, lambda),
            AlgorithmSpec::MinNormOls => Ok(min_norm_ols_fit(d)),
        }
    }
}

fn check_shapes(op: &'static str, d: &Dataset, m: &LinearModel) -> Result<()> {
    if m.p() != d.p() || m.q() != d.q() {
        return Err(Error::dims(
            op,
            format!(
                "model is {}x{}, data has p={} q={}",
                m.p(),
                m.q(),
                d.p(),
                d.q()
            ),
        ));
    }
    Ok(())
}

fn residuals(d: &Dataset, m: &LinearModel) -> Result<Matrix> {
    d.x().matmul(m.coefficients())?.sub(d.y())
}

/// Sum of squared errors `Σᵢ ‖yᵢ − xᵢ·f‖²`.
pub fn sse(d: &Dataset, m: &LinearModel) -> Result<f64> {
    check_shapes("sse", d, m)?;
    Ok(residuals(d, m)?.frobenius_norm_sq())
}

/// `sse + λ‖f‖²_F`.
pub fn ridge_objective(d: &Dataset, m: &LinearModel, lambda: f64) -> Result<f64> {
    check_shapes("ridge_objective", d, m)?;
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidHyperparameter(format!("lambda = {lambda}")));
    }
    Ok(sse(d, m)? + lambda * m.coefficients().frobenius_norm_sq())
}

/// Gradient of [`sse`] with respect to `f`: `2xᵀ(xf − y)`.
pub fn sse_gradient(d: &Dataset, m: &LinearModel) -> Result<Matrix> {
    check_shapes("sse_gradient", d, m)?;
    Ok(d.x().tr_matmul(&residuals(d, m)?)?.scale(2.0))
}

/// Gradient of [`ridge_objective`]: `2xᵀ(xf − y) + 2λf`.
pub fn ridge_gradient(d: &Dataset, m: &LinearModel, lambda: f64) -> Result<Matrix> {
    sse_gradient(d, m)?.add(&m.coefficients().scale(2.0 * lambda))
}

/// Ordinary least squares through the normal equations `(xᵀx) f = xᵀy`.
///
/// Refuses predictors that do not span the predictor space: the minimizer is
/// not unique there and no choice among the minimizers commutes with
/// invertible predictor maps.
pub fn ols_fit(d: &Dataset) -> Result<LinearModel> {
    let rank = numerical_rank(d.x(), 1.0);
    if rank < d.p() {
        return Err(Error::RankDeficient {
            rank,
            required: d.p(),
        });
    }
    let gram = d.x().gram();
    let rhs = d.x().tr_matmul(d.y())?;
    Ok(LinearModel::new(solve_spd(&gram, &rhs)?))
}

/// Ridge regression `(xᵀx + λI) f = xᵀy`. Any rank is accepted; `λ` must be
/// strictly positive (use [`ols_fit`] for λ = 0).
pub fn ridge_fit(d: &Dataset, lambda: f64) -> Result<LinearModel> {
    AlgorithmSpec::Ridge { lambda }.validate()?;
    let gram = d.x().gram().add_diagonal(lambda);
    let rhs = d.x().tr_matmul(d.y())?;
    Ok(LinearModel::new(solve_spd(&gram, &rhs)?))
}

/// Minimum-Frobenius-norm minimizer of the squared error, `f = x⁺y`, via
/// the SVD of `x`. Equal to [`ols_fit`] when `x` has full column rank.
pub fn min_norm_ols_fit(d: &Dataset) -> LinearModel {
    let dec = svd(d.x());
    let rank = dec.rank(1.0);
    let (p, q) = (d.p(), d.q());
    let mut f = Matrix::zeros(p, q);
    for k in 0..rank {
        let sigma = dec.s[k];
        for c in 0..q {
            let uty: f64 = (0..d.n()).map(|i| dec.u[(i, k)] * d.y()[(i, c)]).sum();
            let w = uty / sigma;
            for r in 0..p {
                f[(r, c)] += dec.v[(r, k)] * w;
            }
        }
    }
    LinearModel::new(f)
}

/// Default gradient-descent step `1 / (2·trace(xᵀx))`.
pub fn default_oracle_step(d: &Dataset) -> f64 {
    0.5 / d.x().frobenius_norm_sq()
}

/// Plain gradient descent on the squared error, started from `f = 0`.
///
/// Independent of the closed-form route; used to confirm it.
pub fn ols_oracle_fit(d: &Dataset, steps: usize, step_size: f64) -> Result<LinearModel> {
    let rank = numerical_rank(d.x(), 1.0);
    if rank < d.p() {
        return Err(Error::RankDeficient {
            rank,
            required: d.p(),
        });
    }
    if !(step_size > 0.0 && step_size.is_finite()) {
        return Err(Error::InvalidHyperparameter(format!(
            "step_size = {step_size}"
        )));
    }
    let mut model = LinearModel::new(Matrix::zeros(d.p(), d.q()));
    let mut objective = sse(d, &model)?;
    let stop = 1e-15 * (1.0 + d.x().tr_matmul(d.y())?.frobenius_norm());
    for step in 0..steps {
        let grad = sse_gradient(d, &model)?;
        if grad.frobenius_norm() <= stop {
            break;
        }
        let next = LinearModel::new(model.coefficients().sub(&grad.scale(step_size))?);
        let next_objective = sse(d, &next)?;
        if !next_objective.is_finite()
            || next_objective > objective * (1.0 + 1e-9) + f64::MIN_POSITIVE
        {
            return Err(Error::OracleDiverged { step });
        }
        model = next;
        objective = next_objective;
    }
    Ok(model)
}
