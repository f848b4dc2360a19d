//! The three commutative squares, each reduced to one residual.
//!
//! A residual is the relative Frobenius distance between the two paths
//! around the square, with the untransformed-data path as the reference.
//! Models are compared by coefficient matrices, which is exact for linear
//! maps.

use crate::algorithms::Learner;
use crate::categories::{
    act_on_index, act_on_predictors, act_on_targets, model_action_target,
    model_precompose_predictor, Axis, Morphism,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::rel_distance;

fn require_axis(m: &Morphism, axis: Axis) -> Result<()> {
    if m.axis() != axis {
        return Err(Error::dims(
            "diagram check",
            format!("expected a {axis} morphism, got {}", m.axis()),
        ));
    }
    Ok(())
}

/// Target square: `fit(y·η)` against `fit(y)·η`.
pub fn check_target_naturality<L: Learner + ?Sized>(
    alg: &L,
    d: &Dataset,
    eta: &Morphism,
) -> Result<f64> {
    require_axis(eta, Axis::Target)?;
    let moved_then_fit = alg.fit(&act_on_targets(d, eta)?)?;
    let fit_then_moved = model_action_target(&alg.fit(d)?, eta)?;
    rel_distance(moved_then_fit.coefficients(), fit_then_moved.coefficients())
}

/// Predictor square, oriented as `ξ·f′ = f` where `f′` is trained on
/// `x·ξ` and `f` on `x`. This covers invertible `ξ` and isometric
/// embeddings alike without inverting anything.
pub fn check_predictor_dinaturality<L: Learner + ?Sized>(
    alg: &L,
    d: &Dataset,
    xi: &Morphism,
) -> Result<f64> {
    require_axis(xi, Axis::Predictor)?;
    let f = alg.fit(d)?;
    let f_moved = alg.fit(&act_on_predictors(d, xi)?)?;
    let pulled_back = model_precompose_predictor(xi, &f_moved)?;
    rel_distance(pulled_back.coefficients(), f.coefficients())
}

/// Index square: recombining the examples must leave the fit unchanged.
pub fn check_index_invariance<L: Learner + ?Sized>(
    alg: &L,
    d: &Dataset,
    a: &Morphism,
) -> Result<f64> {
    require_axis(a, Axis::Index)?;
    let f = alg.fit(d)?;
    let f_moved = alg.fit(&act_on_index(d, a)?)?;
    rel_distance(f_moved.coefficients(), f.coefficients())
}

/// Dispatches on the morphism's axis.
pub fn check_diagram<L: Learner + ?Sized>(alg: &L, d: &Dataset, m: &Morphism) -> Result<f64> {
    match m.axis() {
        Axis::Predictor => check_predictor_dinaturality(alg, d, m),
        Axis::Target => check_target_naturality(alg, d, m),
        Axis::Index => check_index_invariance(alg, d, m),
    }
}
