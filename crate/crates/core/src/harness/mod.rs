//! Configuration-driven experiments.
//!
//! An [`ExperimentConfig`] is read from TOML, validated into an
//! [`Experiment`], and [`run`] turns it into a [`BoundReport`] whose CSV
//! form is byte-stable for a given config and seed.

pub mod config;
mod enumerate;
mod inequality;
pub mod report;
mod run;

use std::path::Path;

pub use config::{ConfigError, Experiment, ExperimentConfig, FieldIssue, ModelDef, WeightDef};
pub use enumerate::enumerate;
pub use inequality::{verify_inequality_suite, InequalityReport, InequalityStats};
pub use report::{render_number, BoundReport, CheckSummary, Row, Verdict};
pub use run::{run, run_experiment};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    Ok(ExperimentConfig::from_toml_str(&text)?)
}
