use std::fs;
use std::path::Path;
use std::process::ExitCode;

use natreg_core::dataset::matrix_to_csv;
use natreg_core::naturality::{AuditConfig, CounterexampleSet, OutputFormat};
use natreg_core::report::{audit_json, audit_text, counterexamples_text, to_json};
use natreg_core::{
    min_norm_ols_fit, ols_fit, ridge_fit, ridge_objective, run_audit, sse, AlgorithmSpec, Axis,
    CategoryKind, Dataset, Error,
};

use crate::{AlgorithmArg, AuditArgs, CounterexampleArgs, FitArgs, FormatArg};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn substantive(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RankDeficient { rank, required } => Failure::substantive(format!(
                "predictors are rank deficient (detected rank {rank}, need {required}); \
                 ordinary least squares has no unique solution, try ridge or minnorm-ols"
            )),
            other => Failure::usage(other.to_string()),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

pub fn fit(args: &FitArgs) -> CmdResult {
    let content = fs::read_to_string(&args.data)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.data.display())))?;
    let data = Dataset::from_csv(&content, args.predictors, args.targets)?;
    let model = match args.algorithm {
        AlgorithmArg::Ols => ols_fit(&data)?,
        AlgorithmArg::MinnormOls => min_norm_ols_fit(&data),
        AlgorithmArg::Ridge => {
            let lambda = args
                .lambda
                .ok_or_else(|| Failure::usage("--algorithm ridge requires --lambda"))?;
            ridge_fit(&data, lambda)?
        }
    };
    emit(args.out.as_deref(), &matrix_to_csv(model.coefficients()))?;
    eprintln!("sse={:e}", sse(&data, &model)?);
    if let (AlgorithmArg::Ridge, Some(lambda)) = (args.algorithm, args.lambda) {
        eprintln!(
            "ridge_objective={:e}",
            ridge_objective(&data, &model, lambda)?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn audit_config(args: &AuditArgs) -> Result<AuditConfig, Failure> {
    let mut config = AuditConfig::default();
    if !args.algorithm.is_empty() {
        config.algorithms = args
            .algorithm
            .iter()
            .map(|a| match a {
                AlgorithmArg::Ols => Ok(AlgorithmSpec::Ols),
                AlgorithmArg::MinnormOls => Ok(AlgorithmSpec::MinNormOls),
                AlgorithmArg::Ridge => AlgorithmSpec::ridge(args.lambda),
            })
            .collect::<Result<_, Error>>()?;
    } else {
        config.algorithms = vec![AlgorithmSpec::Ols, AlgorithmSpec::ridge(args.lambda)?];
    }
    if !args.axes.is_empty() {
        config.axes = args
            .axes
            .iter()
            .map(|s| s.parse::<Axis>())
            .collect::<Result<_, Error>>()?;
    }
    if !args.categories.is_empty() {
        config.categories = args
            .categories
            .iter()
            .map(|s| s.parse::<CategoryKind>())
            .collect::<Result<_, Error>>()?;
    }
    if let Some(t) = args.trials {
        config.trials_per_cell = t;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(t) = args.tolerance {
        config.base_tolerance = t;
    }
    config.output_format = match args.format {
        FormatArg::Text => OutputFormat::Text,
        FormatArg::Json => OutputFormat::Json,
    };
    config.validate()?;
    Ok(config)
}

pub fn audit(args: &AuditArgs) -> CmdResult {
    let config = audit_config(args)?;
    let report = run_audit(&config)?;
    let body = match config.output_format {
        OutputFormat::Text => audit_text(&report),
        OutputFormat::Json => audit_json(&report),
    };
    emit(args.out.as_deref(), &body)?;
    if report.all_agree() {
        Ok(ExitCode::SUCCESS)
    } else {
        let bad = report.cells.iter().filter(|c| !c.agrees_with_paper).count();
        Err(Failure::substantive(format!(
            "{bad} audit cell(s) disagree with the expected classification"
        )))
    }
}

pub fn counterexamples(args: &CounterexampleArgs) -> CmdResult {
    let set = CounterexampleSet::run(args.k, args.b, args.c, args.lambda)?;
    let body = match args.format {
        FormatArg::Text => counterexamples_text(&set),
        FormatArg::Json => to_json(&set),
    };
    emit(None, &body)?;
    if set.all_exhibited() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::substantive(
            "at least one counterexample shows no violation",
        ))
    }
}
