//! Batch front-end for scatterkit: one TOML config in, CSV tables and a JSON
//! summary out.
//!
//! Exit codes: 0 success, 2 usage or malformed config (nothing written),
//! 3 precondition violation, 4 numerical failure (a `diagnostics` table is
//! written next to whatever tables were complete).

pub mod bundle;
pub mod config;
pub mod experiments;

use std::path::{Path, PathBuf};

use scatterkit::ErrorClass;
use thiserror::Error;

use bundle::{Failure, ResultBundle, Table};
use config::ExperimentConfig;
use experiments::{experiment, Derived};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SCATTERKIT_OUT";

/// Fallback output directory when neither flag, config nor environment names one.
pub const DEFAULT_OUT: &str = "scatterkit-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("malformed config: {0}")]
    Malformed(String),

    #[error("{0}")]
    Run(#[from] scatterkit::Error),

    #[error("cannot write results to {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Malformed(_) => 2,
            CliError::Run(e) => match e.class() {
                ErrorClass::Precondition => 3,
                ErrorClass::Numerical => 4,
            },
            CliError::Write { .. } => 1,
        }
    }
}

/// Schema and range check; returns the derived quantities for review.
pub fn validate(cfg: &ExperimentConfig) -> Result<Derived, CliError> {
    Ok(experiment(cfg.experiment.name())?.validate(cfg)?)
}

/// Flag, then config, then environment, then [`DEFAULT_OUT`].
pub fn output_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs the experiment in memory. Validation failures return before any
/// bundle exists; run failures come back with the partial bundle.
pub fn execute(cfg: &ExperimentConfig) -> Result<ResultBundle, (Option<ResultBundle>, CliError)> {
    let exp = experiment(cfg.experiment.name()).map_err(|e| (None, e))?;
    exp.validate(cfg).map_err(|e| (None, e.into()))?;
    let mut bundle = ResultBundle::new(cfg);
    match exp.run(cfg, &mut bundle) {
        Ok(()) => {
            debug_assert!(bundle.orphan_scalars().is_empty(), "{:?}", bundle.orphan_scalars());
            Ok(bundle)
        }
        Err(e) => {
            let class = match e.class() {
                ErrorClass::Precondition => "precondition",
                ErrorClass::Numerical => "numerical",
            };
            let mut diag = Table::new("diagnostics", &["class", "message"]);
            diag.push(vec![class.into(), e.to_string().as_str().into()]);
            bundle.table(diag);
            bundle.failure = Some(Failure { class: class.into(), message: e.to_string() });
            Err((Some(bundle), e.into()))
        }
    }
}

/// Runs and writes the bundle to `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<ResultBundle, CliError> {
    let write = |b: &ResultBundle| b.write(dir).map_err(|e| CliError::Write { path: dir.to_path_buf(), source: e });
    match execute(cfg) {
        Ok(b) => {
            write(&b)?;
            Ok(b)
        }
        Err((Some(b), e)) => {
            write(&b)?;
            Err(e)
        }
        Err((None, e)) => Err(e),
    }
}
