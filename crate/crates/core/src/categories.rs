//! Morphism categories, their samplers, and how morphisms act on datasets
//! and on learned models.
//!
//! Convention: examples are rows. A predictor or target morphism is a
//! `source × target` matrix acting by right multiplication on data rows.
//! An index morphism is a `target × source` matrix acting by left
//! multiplication on the stacked example matrices.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::algorithms::LinearModel;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{
    condition_estimate, gaussian_from, numerical_rank, qr_thin, Matrix, SeedState,
};

/// Constraint tolerance for sampled or user-supplied morphisms.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Default upper bound on the condition number of sampled invertible maps.
pub const DEFAULT_KAPPA_MAX: f64 = 1e4;

const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryKind {
    /// All linear maps, any dimensions.
    #[serde(rename = "finvec")]
    FinVec,
    /// Invertible square maps.
    #[serde(rename = "finvec_iso")]
    FinVecIso,
    /// Orthogonal square maps.
    Euc,
    /// Isometric embeddings into an equal or higher dimension.
    EucMono,
    /// Permutations.
    SetIso,
    /// Identities only.
    Discrete,
}

impl CategoryKind {
    pub const ALL: [CategoryKind; 6] = [
        CategoryKind::FinVec,
        CategoryKind::FinVecIso,
        CategoryKind::Euc,
        CategoryKind::EucMono,
        CategoryKind::SetIso,
        CategoryKind::Discrete,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CategoryKind::FinVec => "finvec",
            CategoryKind::FinVecIso => "finvec_iso",
            CategoryKind::Euc => "euc",
            CategoryKind::EucMono => "euc_mono",
            CategoryKind::SetIso => "set_iso",
            CategoryKind::Discrete => "discrete",
        }
    }

    /// True when source and target dimensions must agree.
    pub fn is_square(&self) -> bool {
        !matches!(self, CategoryKind::FinVec | CategoryKind::EucMono)
    }
}

impl fmt::Display for CategoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CategoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config {
                field: "categories",
                message: format!("unknown category {s:?}"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Predictor,
    Target,
    Index,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Predictor, Axis::Target, Axis::Index];

    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Predictor => "predictor",
            Axis::Target => "target",
            Axis::Index => "index",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config {
                field: "axes",
                message: format!("unknown axis {s:?}"),
            })
    }
}

/// A matrix tagged with its category and the axis it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    kind: CategoryKind,
    axis: Axis,
    m: Matrix,
}

impl Morphism {
    /// Wraps `m`, checking its shape convention and category constraint.
    pub fn new(kind: CategoryKind, axis: Axis, m: Matrix) -> Result<Self> {
        let morphism = Self { kind, axis, m };
        let (src, tgt) = (morphism.source_dim(), morphism.target_dim());
        if kind.is_square() && src != tgt {
            return Err(Error::dims(
                "Morphism::new",
                format!("{kind} needs equal dimensions, got {src}->{tgt}"),
            ));
        }
        if kind == CategoryKind::EucMono && tgt < src {
            return Err(Error::dims(
                "Morphism::new",
                format!("euc_mono cannot map {src}->{tgt}"),
            ));
        }
        let residual = verify_morphism(&morphism);
        if residual.is_nan() || residual > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolated {
                kind: kind.as_str(),
                residual,
            });
        }
        Ok(morphism)
    }

    pub fn identity(kind: CategoryKind, axis: Axis, dim: usize) -> Self {
        Self {
            kind,
            axis,
            m: Matrix::identity(dim),
        }
    }

    pub fn kind(&self) -> CategoryKind {
        self.kind
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn source_dim(&self) -> usize {
        match self.axis {
            Axis::Index => self.m.cols(),
            _ => self.m.rows(),
        }
    }

    pub fn target_dim(&self) -> usize {
        match self.axis {
            Axis::Index => self.m.rows(),
            _ => self.m.cols(),
        }
    }

    /// `self` followed by `next`. The kind is kept when both agree and
    /// widens to `finvec` otherwise.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if self.axis != next.axis {
            return Err(Error::dims("Morphism::then", "axes differ"));
        }
        if self.target_dim() != next.source_dim() {
            return Err(Error::dims(
                "Morphism::then",
                format!(
                    "{} -> {} not composable",
                    self.target_dim(),
                    next.source_dim()
                ),
            ));
        }
        let m = match self.axis {
            Axis::Index => next.m.matmul(&self.m)?,
            _ => self.m.matmul(&next.m)?,
        };
        let kind = if self.kind == next.kind {
            self.kind
        } else {
            CategoryKind::FinVec
        };
        Ok(Morphism {
            kind,
            axis: self.axis,
            m,
        })
    }
}

/// Draws a random morphism of `kind` on `axis`.
///
/// Invertible maps are resampled until their condition number is at most
/// `kappa_max`; isometries come from the orthonormal QR factor of a
/// Gaussian matrix.
pub fn sample_morphism(
    kind: CategoryKind,
    axis: Axis,
    source_dim: usize,
    target_dim: usize,
    seed: &SeedState,
    kappa_max: f64,
) -> Result<Morphism> {
    if source_dim == 0 || target_dim == 0 {
        return Err(Error::dims(
            "sample_morphism",
            "dimensions must be positive",
        ));
    }
    if kind.is_square() && source_dim != target_dim {
        return Err(Error::dims(
            "sample_morphism",
            format!("{kind} needs equal dimensions, got {source_dim}->{target_dim}"),
        ));
    }
    if kind == CategoryKind::EucMono && target_dim < source_dim {
        return Err(Error::dims(
            "sample_morphism",
            format!("euc_mono cannot map {source_dim}->{target_dim}"),
        ));
    }
    let mut rng = seed.rng();
    let n = source_dim;
    let m = match kind {
        CategoryKind::FinVec => match axis {
            Axis::Index => gaussian_from(target_dim, source_dim, &mut rng),
            _ => gaussian_from(source_dim, target_dim, &mut rng),
        },
        CategoryKind::FinVecIso => {
            let mut attempt = 0;
            loop {
                let g = gaussian_from(n, n, &mut rng);
                if condition_estimate(&g) <= kappa_max {
                    break g;
                }
                attempt += 1;
                if attempt >= MAX_RESAMPLES {
                    return Err(Error::SamplerExhausted {
                        attempts: attempt,
                        reason: format!("no {n}x{n} Gaussian with condition <= {kappa_max:e}"),
                    });
                }
            }
        }
        CategoryKind::Euc => orthonormal_columns(n, n, &mut rng)?,
        CategoryKind::EucMono => {
            // target_dim × source_dim with orthonormal columns
            let q = orthonormal_columns(target_dim, source_dim, &mut rng)?;
            match axis {
                Axis::Index => q,
                _ => q.transpose(),
            }
        }
        CategoryKind::SetIso => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            Matrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 })
        }
        CategoryKind::Discrete => Matrix::identity(n),
    };
    Ok(Morphism { kind, axis, m })
}

fn orthonormal_columns(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> Result<Matrix> {
    for _ in 0..MAX_RESAMPLES {
        let g = gaussian_from(rows, cols, rng);
        match qr_thin(&g) {
            Ok((q, _)) => return Ok(q),
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplerExhausted {
        attempts: MAX_RESAMPLES,
        reason: format!("no full-rank {rows}x{cols} Gaussian"),
    })
}

fn identity_residual(m: &Matrix) -> f64 {
    m.sub(&Matrix::identity(m.rows()))
        .map(|d| d.frobenius_norm())
        .unwrap_or(f64::INFINITY)
}

/// Constraint residual of `m` for its kind; zero means the constraint holds
/// exactly. Unconstrained kinds return 0 and non-invertible `finvec_iso`
/// maps return `+∞`.
pub fn verify_morphism(m: &Morphism) -> f64 {
    let a = &m.m;
    match m.kind {
        CategoryKind::FinVec => 0.0,
        CategoryKind::FinVecIso => {
            if a.is_square() && numerical_rank(a, 1.0) == a.rows() {
                0.0
            } else {
                f64::INFINITY
            }
        }
        CategoryKind::Euc => {
            if !a.is_square() {
                return f64::INFINITY;
            }
            let t = a.transpose();
            let left = identity_residual(&t.matmul(a).expect("square"));
            let right = identity_residual(&a.matmul(&t).expect("square"));
            left.max(right)
        }
        CategoryKind::EucMono => {
            let t = a.transpose();
            let gram = match m.axis {
                Axis::Index => t.matmul(a),
                _ => a.matmul(&t),
            };
            gram.map(|g| identity_residual(&g)).unwrap_or(f64::INFINITY)
        }
        CategoryKind::SetIso => permutation_residual(a),
        CategoryKind::Discrete => {
            if a.is_square() {
                identity_residual(a)
            } else {
                f64::INFINITY
            }
        }
    }
}

fn permutation_residual(a: &Matrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.rows();
    let mut col_hits = vec![0usize; n];
    let mut off = 0.0f64;
    for i in 0..n {
        let mut row_hits = 0;
        for j in 0..n {
            let v = a[(i, j)];
            if (v - 1.0).abs() <= 0.5 {
                row_hits += 1;
                col_hits[j] += 1;
                off += (v - 1.0) * (v - 1.0);
            } else {
                off += v * v;
            }
        }
        if row_hits != 1 {
            return f64::INFINITY;
        }
    }
    if col_hits.iter().any(|&c| c != 1) {
        return f64::INFINITY;
    }
    off.sqrt()
}

fn expect_axis(op: &'static str, m: &Morphism, axis: Axis) -> Result<()> {
    if m.axis != axis {
        return Err(Error::dims(
            op,
            format!("expected a {axis} morphism, got {}", m.axis),
        ));
    }
    Ok(())
}

fn expect_source(op: &'static str, m: &Morphism, dim: usize) -> Result<()> {
    if m.source_dim() != dim {
        return Err(Error::dims(
            op,
            format!(
                "morphism source is {}, data dimension is {dim}",
                m.source_dim()
            ),
        ));
    }
    Ok(())
}

/// `x ↦ x·ξ`; targets untouched.
pub fn act_on_predictors(d: &Dataset, xi: &Morphism) -> Result<Dataset> {
    expect_axis("act_on_predictors", xi, Axis::Predictor)?;
    expect_source("act_on_predictors", xi, d.p())?;
    Dataset::new(d.x().matmul(&xi.m)?, d.y().clone())
}

/// `y ↦ y·η`; predictors untouched.
pub fn act_on_targets(d: &Dataset, eta: &Morphism) -> Result<Dataset> {
    expect_axis("act_on_targets", eta, Axis::Target)?;
    expect_source("act_on_targets", eta, d.q())?;
    Dataset::new(d.x().clone(), d.y().matmul(&eta.m)?)
}

/// `x ↦ a·x`, `y ↦ a·y`: recombines (or reorders) the examples.
pub fn act_on_index(d: &Dataset, a: &Morphism) -> Result<Dataset> {
    expect_axis("act_on_index", a, Axis::Index)?;
    expect_source("act_on_index", a, d.n())?;
    Dataset::new(a.m.matmul(d.x())?, a.m.matmul(d.y())?)
}

/// Post-composition with a target map: `f ↦ f·η`.
pub fn model_action_target(model: &LinearModel, eta: &Morphism) -> Result<LinearModel> {
    expect_axis("model_action_target", eta, Axis::Target)?;
    if eta.source_dim() != model.q() {
        return Err(Error::dims(
            "model_action_target",
            format!("eta source {} vs model q {}", eta.source_dim(), model.q()),
        ));
    }
    Ok(LinearModel::new(model.coefficients().matmul(&eta.m)?))
}

/// Pre-composition with a predictor map: returns `ξ·f`, the model
/// `x ↦ (x·ξ)·f` on the source space of `ξ`.
pub fn model_precompose_predictor(xi: &Morphism, model: &LinearModel) -> Result<LinearModel> {
    expect_axis("model_precompose_predictor", xi, Axis::Predictor)?;
    if xi.target_dim() != model.p() {
        return Err(Error::dims(
            "model_precompose_predictor",
            format!("xi target {} vs model p {}", xi.target_dim(), model.p()),
        ));
    }
    Ok(LinearModel::new(xi.m.matmul(model.coefficients())?))
}
