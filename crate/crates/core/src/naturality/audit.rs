//! Randomized audit: for every (algorithm, axis, category) cell, sample
//! datasets and morphisms, evaluate the matching square, and compare the
//! outcome with the expected classification.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::AlgorithmSpec;
use crate::categories::{sample_morphism, Axis, CategoryKind, DEFAULT_KAPPA_MAX};
use crate::dataset::synth_dataset;
use crate::error::{Error, Result};
use crate::linalg::{condition_estimate, SeedState};
use crate::naturality::counterexamples::CounterexampleSet;
use crate::naturality::diagrams::check_diagram;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A NotNatural cell is confirmed once some residual exceeds this multiple
/// of its trial tolerance.
pub const VIOLATION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Natural,
    NotNatural,
}

/// The expected classification of each (algorithm, axis, category) cell.
///
/// Both regressions commute with every linear map of the targets and with
/// isometric recombinations of the examples. On predictors, least squares
/// commutes with invertible maps only, ridge with isometries only, and the
/// minimum-norm variant with both (on full-rank data).
pub fn expected_naturality(alg: &AlgorithmSpec, axis: Axis, kind: CategoryKind) -> Expectation {
    use CategoryKind::*;
    let natural = match axis {
        Axis::Target => true,
        Axis::Index => matches!(kind, EucMono | Euc | SetIso | Discrete),
        Axis::Predictor => match alg {
            AlgorithmSpec::Ols => matches!(kind, FinVecIso | Euc | SetIso | Discrete),
            AlgorithmSpec::Ridge { .. } => matches!(kind, EucMono | Euc | SetIso | Discrete),
            AlgorithmSpec::MinNormOls => kind != FinVec,
        },
    };
    if natural {
        Expectation::Natural
    } else {
        Expectation::NotNatural
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl DimRange {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditDims {
    pub p: DimRange,
    pub q: DimRange,
    /// Example count; the lower end is raised to `p + 1` per trial so the
    /// predictors have full column rank.
    pub n: DimRange,
    /// Maximum extra codomain dimension for predictor/target morphisms.
    pub codomain_offset: usize,
    /// Maximum extra codomain dimension for index morphisms.
    pub index_offset: usize,
}

impl Default for AuditDims {
    fn default() -> Self {
        Self {
            p: DimRange::new(1, 8),
            q: DimRange::new(1, 8),
            n: DimRange::new(1, 40),
            codomain_offset: 5,
            index_offset: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub algorithms: Vec<AlgorithmSpec>,
    pub axes: Vec<Axis>,
    pub categories: Vec<CategoryKind>,
    pub dims: AuditDims,
    pub trials_per_cell: usize,
    pub master_seed: u64,
    pub base_tolerance: f64,
    pub kappa_max: f64,
    pub noise_sd: f64,
    pub include_counterexamples: bool,
    pub output_format: OutputFormat,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![AlgorithmSpec::Ols, AlgorithmSpec::Ridge { lambda: 1.0 }],
            axes: Axis::ALL.to_vec(),
            categories: CategoryKind::ALL.to_vec(),
            dims: AuditDims::default(),
            trials_per_cell: 200,
            master_seed: 42,
            base_tolerance: 1e-8,
            kappa_max: DEFAULT_KAPPA_MAX,
            noise_sd: 0.5,
            include_counterexamples: true,
            output_format: OutputFormat::Text,
        }
    }
}

fn config_error(field: &'static str, message: impl Into<String>) -> Error {
    Error::Config {
        field,
        message: message.into(),
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_cell == 0 {
            return Err(config_error("trials_per_cell", "must be at least 1"));
        }
        if !(self.base_tolerance > 0.0 && self.base_tolerance.is_finite()) {
            return Err(config_error("base_tolerance", "must be positive"));
        }
        if self.kappa_max.is_nan() || self.kappa_max < 1.0 {
            return Err(config_error("kappa_max", "must be at least 1"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(config_error("noise_sd", "must be non-negative"));
        }
        if self.algorithms.is_empty() {
            return Err(config_error("algorithms", "empty"));
        }
        if self.axes.is_empty() {
            return Err(config_error("axes", "empty"));
        }
        if self.categories.is_empty() {
            return Err(config_error("categories", "empty"));
        }
        for alg in &self.algorithms {
            alg.validate()
                .map_err(|e| config_error("algorithms", e.to_string()))?;
        }
        for (field, r) in [
            ("dims.p", self.dims.p),
            ("dims.q", self.dims.q),
            ("dims.n", self.dims.n),
        ] {
            if r.min == 0 || r.min > r.max {
                return Err(config_error(
                    field,
                    format!("invalid range {}..={}", r.min, r.max),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialDims {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub morphism_target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramTrial {
    pub axis: Axis,
    pub category: CategoryKind,
    pub algorithm: AlgorithmSpec,
    pub dims: TrialDims,
    pub seed: SeedState,
    /// `+∞` when a fit refused the transformed data.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl DiagramTrial {
    pub fn clear_violation(&self) -> bool {
        self.residual > VIOLATION_FACTOR * self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub algorithm: AlgorithmSpec,
    pub axis: Axis,
    pub category: CategoryKind,
    pub expected: Expectation,
    pub pass_count: usize,
    pub fail_count: usize,
    /// Trials whose residual exceeded `VIOLATION_FACTOR × tolerance`.
    pub clear_violations: usize,
    /// Largest finite residual; refused fits are counted in `fail_count`.
    pub max_residual: f64,
    pub agrees_with_paper: bool,
}

impl CellSummary {
    pub fn trials(&self) -> usize {
        self.pass_count + self.fail_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub tool_version: String,
    pub master_seed: u64,
    pub config: AuditConfig,
    pub trials: Vec<DiagramTrial>,
    pub cells: Vec<CellSummary>,
    pub counterexamples: Option<CounterexampleSet>,
}

impl AuditReport {
    pub fn all_agree(&self) -> bool {
        self.cells.iter().all(|c| c.agrees_with_paper)
    }
}

/// Seed label of a cell; independent of the cell's position in the config.
pub fn cell_label(alg: &AlgorithmSpec, axis: Axis, kind: CategoryKind) -> String {
    match alg.lambda() {
        Some(l) => format!("{}[{l:e}]/{axis}/{kind}", alg.name()),
        None => format!("{}/{axis}/{kind}", alg.name()),
    }
}

fn morphism_codomain(
    kind: CategoryKind,
    source: usize,
    offset: usize,
    rng: &mut impl Rng,
) -> usize {
    match kind {
        CategoryKind::EucMono => source + rng.random_range(0..=offset),
        CategoryKind::FinVec => rng.random_range(1..=source + offset),
        _ => source,
    }
}

/// Runs one sampled square.
pub fn run_trial(
    config: &AuditConfig,
    alg: &AlgorithmSpec,
    axis: Axis,
    kind: CategoryKind,
    seed: SeedState,
) -> Result<DiagramTrial> {
    let mut rng = seed.derive("dims").rng();
    let dims = &config.dims;
    let p = dims.p.sample(&mut rng);
    let q = dims.q.sample(&mut rng);
    let n = DimRange::new(dims.n.min.max(p + 1), dims.n.max.max(p + 1)).sample(&mut rng);
    let (source, offset) = match axis {
        Axis::Predictor => (p, dims.codomain_offset),
        Axis::Target => (q, dims.codomain_offset),
        Axis::Index => (n, dims.index_offset),
    };
    let target = morphism_codomain(kind, source, offset, &mut rng);

    let (data, _) = synth_dataset(&seed.derive("data"), n, p, q, config.noise_sd)?;
    let morphism = sample_morphism(
        kind,
        axis,
        source,
        target,
        &seed.derive("morphism"),
        config.kappa_max,
    )?;

    let factor = if morphism.matrix().is_square() {
        let kappa = condition_estimate(morphism.matrix());
        if kappa.is_finite() {
            kappa.max(1.0)
        } else {
            1.0
        }
    } else {
        1.0
    };
    let tolerance = config.base_tolerance * factor;

    let (residual, error) = match check_diagram(alg, &data, &morphism) {
        Ok(r) => (r, None),
        Err(e @ (Error::RankDeficient { .. } | Error::NotPositiveDefinite { .. })) => {
            (f64::INFINITY, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    Ok(DiagramTrial {
        axis,
        category: kind,
        algorithm: *alg,
        dims: TrialDims {
            p,
            q,
            n,
            morphism_target: target,
        },
        seed,
        residual,
        tolerance,
        passed: residual <= tolerance,
        error,
    })
}

pub fn summarize_cell(
    alg: &AlgorithmSpec,
    axis: Axis,
    kind: CategoryKind,
    trials: &[DiagramTrial],
) -> CellSummary {
    let expected = expected_naturality(alg, axis, kind);
    let pass_count = trials.iter().filter(|t| t.passed).count();
    let clear_violations = trials.iter().filter(|t| t.clear_violation()).count();
    let max_residual = trials
        .iter()
        .map(|t| t.residual)
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    let agrees_with_paper = match expected {
        Expectation::Natural => pass_count == trials.len(),
        Expectation::NotNatural => clear_violations > 0,
    };
    CellSummary {
        algorithm: *alg,
        axis,
        category: kind,
        expected,
        pass_count,
        fail_count: trials.len() - pass_count,
        clear_violations,
        max_residual,
        agrees_with_paper,
    }
}

/// Executes every cell of `config`. The result depends only on the config:
/// trials run in parallel but each draws from its own seed stream and the
/// report is assembled in trial order.
pub fn run_audit(config: &AuditConfig) -> Result<AuditReport> {
    config.validate()?;
    let mut cells = Vec::new();
    for alg in &config.algorithms {
        for &axis in &config.axes {
            for &kind in &config.categories {
                cells.push((*alg, axis, kind));
            }
        }
    }
    let trials_per_cell = config.trials_per_cell;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..trials_per_cell).map(move |t| (c, t)))
        .collect();
    let trials: Vec<DiagramTrial> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (alg, axis, kind) = cells[c];
            let seed = SeedState::new(config.master_seed, cell_label(&alg, axis, kind)).trial(t);
            run_trial(config, &alg, axis, kind, seed)
        })
        .collect::<Result<_>>()?;

    let summaries = cells
        .iter()
        .enumerate()
        .map(|(c, (alg, axis, kind))| {
            let chunk = &trials[c * trials_per_cell..(c + 1) * trials_per_cell];
            summarize_cell(alg, *axis, *kind, chunk)
        })
        .collect();

    let counterexamples = if config.include_counterexamples {
        Some(CounterexampleSet::run(1.0, 1.0, 2.0, 1.0)?)
    } else {
        None
    };

    Ok(AuditReport {
        tool_version: TOOL_VERSION.to_string(),
        master_seed: config.master_seed,
        config: config.clone(),
        trials,
        cells: summaries,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        let config = AuditConfig {
            trials_per_cell: 0,
            ..AuditConfig::default()
        };
        assert!(matches!(
            run_audit(&config),
            Err(Error::Config {
                field: "trials_per_cell",
                ..
            })
        ));
    }

    #[test]
    fn bad_ranges_rejected() {
        let mut config = AuditConfig::default();
        config.dims.p = DimRange::new(3, 2);
        assert!(matches!(
            config.validate(),
            Err(Error::Config {
                field: "dims.p",
                ..
            })
        ));
        let config = AuditConfig {
            algorithms: vec![AlgorithmSpec::Ridge { lambda: 0.0 }],
            ..AuditConfig::default()
        };
        assert!(matches!(
            config.validate(),
            Err(Error::Config {
                field: "algorithms",
                ..
            })
        ));
    }

    #[test]
    fn expected_table_matches_classification() {
        let ols = AlgorithmSpec::Ols;
        let ridge = AlgorithmSpec::Ridge { lambda: 1.0 };
        use CategoryKind::*;
        use Expectation::*;
        assert_eq!(
            expected_naturality(&ols, Axis::Predictor, FinVecIso),
            Natural
        );
        assert_eq!(
            expected_naturality(&ols, Axis::Predictor, FinVec),
            NotNatural
        );
        assert_eq!(
            expected_naturality(&ols, Axis::Predictor, EucMono),
            NotNatural
        );
        assert_eq!(
            expected_naturality(&ridge, Axis::Predictor, EucMono),
            Natural
        );
        assert_eq!(
            expected_naturality(&ridge, Axis::Predictor, FinVecIso),
            NotNatural
        );
        for alg in [ols, ridge] {
            assert_eq!(expected_naturality(&alg, Axis::Target, FinVec), Natural);
            assert_eq!(expected_naturality(&alg, Axis::Index, EucMono), Natural);
            assert_eq!(
                expected_naturality(&alg, Axis::Index, FinVecIso),
                NotNatural
            );
        }
    }

    #[test]
    fn small_audit_is_deterministic() {
        let config = AuditConfig {
            trials_per_cell: 3,
            ..AuditConfig::default()
        };
        let a = run_audit(&config).unwrap();
        let b = run_audit(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 2 * 3 * 6);
        assert_eq!(a.trials.len(), 2 * 3 * 6 * 3);
    }

    #[test]
    fn trial_outcome_independent_of_cell_order() {
        let full = AuditConfig {
            trials_per_cell: 2,
            ..AuditConfig::default()
        };
        let single = AuditConfig {
            algorithms: vec![AlgorithmSpec::Ridge { lambda: 1.0 }],
            axes: vec![Axis::Index],
            categories: vec![CategoryKind::EucMono],
            ..full.clone()
        };
        let a = run_audit(&full).unwrap();
        let b = run_audit(&single).unwrap();
        let same: Vec<_> = a
            .trials
            .iter()
            .filter(|t| {
                t.axis == Axis::Index
                    && t.category == CategoryKind::EucMono
                    && t.algorithm.lambda().is_some()
            })
            .cloned()
            .collect();
        assert_eq!(same, b.trials);
    }
}
