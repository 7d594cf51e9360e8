//! Experiment configuration files.
//!
//! Configs are TOML with a mandatory schema tag:
//!
//! ```toml
//! schema = "unipred-experiment/1"
//! alphabet = 2
//! truth = 0
//! horizon = 8
//! weights = "uniform"          # or "description_length", or [0.25, 0.75]
//! mode = "exact"               # or "monte_carlo"
//! trials = 2000                # monte_carlo only
//! seed = 42
//! budget = 10000000            # max prefixes visited by exact enumeration
//!
//! [[models]]
//! family = "periodic"
//! pattern = [1]
//!
//! [[models]]
//! family = "iid"
//! probabilities = [0.5, 0.5]
//!
//! [loss]                       # optional; rows are outcomes, columns actions
//! table = [[0.0, 1.0], [1.0, 0.0]]
//! every = 2                    # optional: only every 2nd step is scored
//!
//! [betting]                    # optional game of chance
//! stakes = [1.0, 1.0]
//! rewards = [[2.0, 0.0], [0.0, 2.0]]
//! ```
//!
//! Additional `[[strategies]]` tables (same shape as `[[models]]`) add custom
//! predictors `Θ_ρ` / `Λ_ρ` to the optimality checks.

use std::fmt;

use serde::Deserialize;

use crate::decision::{LossMatrix, Payouts, StepMask};
use crate::engine::{Evaluation, DEFAULT_BUDGET};
use crate::mixture::ModelClass;
use crate::source::{Alphabet, ModelFamily, Source};

pub const SCHEMA: &str = "unipred-experiment/1";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDef {
    Iid {
        probabilities: Vec<f64>,
    },
    Markov {
        order: usize,
        transitions: Vec<Vec<f64>>,
        /// Uniform when omitted.
        initial: Option<Vec<f64>>,
    },
    Periodic {
        pattern: Vec<usize>,
    },
}

impl ModelDef {
    pub fn build(&self, alphabet: Alphabet) -> crate::Result<ModelFamily> {
        let model = match self {
            Self::Iid { probabilities } => ModelFamily::iid(probabilities.clone())?,
            Self::Markov {
                order,
                transitions,
                initial,
            } => {
                let n = alphabet.size();
                let initial = initial.clone().unwrap_or_else(|| vec![1.0 / n as f64; n]);
                ModelFamily::markov(*order, transitions.clone(), initial)?
            }
            Self::Periodic { pattern } => ModelFamily::periodic(alphabet, pattern.clone())?,
        };
        if model.alphabet() != alphabet {
            return Err(crate::Error::InvalidModel(format!(
                "model has {} symbols, config alphabet has {}",
                model.alphabet().size(),
                alphabet.size()
            )));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WeightDef {
    Named(WeightMode),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Uniform,
    DescriptionLength,
}

impl Default for WeightDef {
    fn default() -> Self {
        Self::Named(WeightMode::Uniform)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossDef {
    pub table: Vec<Vec<f64>>,
    pub l_min: Option<f64>,
    pub l_delta: Option<f64>,
    /// Score only steps that are multiples of this.
    pub every: Option<usize>,
    /// Explicit per-step scoring mask; overrides `every`.
    pub mask: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BettingDef {
    pub stakes: Vec<f64>,
    /// Rows are outcomes, columns actions.
    pub rewards: Vec<Vec<f64>>,
    pub p_max: Option<f64>,
    pub p_delta: Option<f64>,
}

fn default_trials() -> u64 {
    1000
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub alphabet: usize,
    pub models: Vec<ModelDef>,
    #[serde(default)]
    pub weights: WeightDef,
    pub truth: usize,
    pub horizon: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub strategies: Vec<ModelDef>,
    pub loss: Option<LossDef>,
    pub betting: Option<BettingDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIssue {
    pub field: String,
    pub message: String,
}

/// Every problem found in a config, by field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub issues: Vec<FieldIssue>,
}

impl ConfigError {
    fn single(field: &str, message: impl Into<String>) -> Self {
        Self {
            issues: vec![FieldIssue {
                field: field.into(),
                message: message.into(),
            }],
        }
    }

    pub fn fields(&self) -> Vec<&str> {
        self.issues.iter().map(|i| i.field.as_str()).collect()
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config:")?;
        for issue in &self.issues {
            write!(f, "\n  {}: {}", issue.field, issue.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// A validated config with every model, loss and payout constructed.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub class: ModelClass,
    pub truth: usize,
    pub horizon: usize,
    pub evaluation: Evaluation,
    pub strategies: Vec<ModelFamily>,
    pub loss: Option<(LossMatrix, StepMask)>,
    pub payouts: Option<Payouts>,
}

#[derive(Default)]
struct Issues(Vec<FieldIssue>);

impl Issues {
    fn push(&mut self, field: impl Into<String>, message: impl ToString) {
        self.0.push(FieldIssue {
            field: field.into(),
            message: message.to_string(),
        });
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            ConfigError::single("<toml>", msg)
        })
    }

    /// Checks every field and builds the experiment, reporting all issues at once.
    pub fn validate(&self) -> Result<Experiment, ConfigError> {
        let mut issues = Issues::default();
        if self.schema != SCHEMA {
            issues.push(
                "schema",
                format!("expected \"{SCHEMA}\", found \"{}\"", self.schema),
            );
        }
        let alphabet = match Alphabet::new(self.alphabet) {
            Ok(a) => Some(a),
            Err(e) => {
                issues.push("alphabet", e);
                None
            }
        };
        if self.models.is_empty() {
            issues.push("models", "at least one model is required");
        }
        if self.truth >= self.models.len() {
            issues.push(
                "truth",
                format!("index {} outside {} models", self.truth, self.models.len()),
            );
        }
        if self.horizon == 0 {
            issues.push("horizon", "must be at least 1");
        }
        if self.mode == Mode::MonteCarlo && self.trials == 0 {
            issues.push("trials", "must be at least 1");
        }
        if self.mode == Mode::Exact && self.budget == 0 {
            issues.push("budget", "must be at least 1");
        }

        let Some(alphabet) = alphabet else {
            return Err(ConfigError { issues: issues.0 });
        };
        let build_all = |defs: &[ModelDef], field: &str, issues: &mut Issues| {
            defs.iter()
                .enumerate()
                .filter_map(|(i, def)| match def.build(alphabet) {
                    Ok(m) => Some(m),
                    Err(e) => {
                        issues.push(format!("{field}[{i}]"), e);
                        None
                    }
                })
                .collect::<Vec<_>>()
        };
        let models = build_all(&self.models, "models", &mut issues);
        let strategies = build_all(&self.strategies, "strategies", &mut issues);

        let class = if models.len() == self.models.len() && !models.is_empty() {
            let built = match &self.weights {
                WeightDef::Named(WeightMode::Uniform) => ModelClass::uniform(models),
                WeightDef::Named(WeightMode::DescriptionLength) => {
                    ModelClass::by_description_length(models)
                }
                WeightDef::Explicit(w) => ModelClass::new(models, w.clone()),
            };
            built.map_err(|e| issues.push("weights", e)).ok()
        } else {
            None
        };

        let loss = self.loss.as_ref().and_then(|def| {
            if def.table.len() != alphabet.size() {
                issues.push(
                    "loss.table",
                    format!("{} rows for {} outcomes", def.table.len(), alphabet.size()),
                );
                return None;
            }
            let matrix = match (def.l_min, def.l_delta) {
                (None, None) => LossMatrix::from_rows(def.table.clone()),
                (l_min, l_delta) => {
                    let lo = def
                        .table
                        .iter()
                        .flatten()
                        .copied()
                        .fold(f64::INFINITY, f64::min);
                    let hi = def
                        .table
                        .iter()
                        .flatten()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max);
                    let l_min = l_min.unwrap_or(lo);
                    LossMatrix::new(def.table.clone(), l_min, l_delta.unwrap_or(hi - l_min))
                }
            };
            if def.every == Some(0) {
                issues.push("loss.every", "must be at least 1");
            }
            let mask = match (&def.mask, def.every) {
                (Some(m), _) => StepMask::Explicit(m.clone()),
                (None, Some(m)) => StepMask::Every(m),
                (None, None) => StepMask::All,
            };
            matrix
                .map(|m| (m, mask))
                .map_err(|e| issues.push("loss.table", e))
                .ok()
        });

        let payouts = self.betting.as_ref().and_then(|def| {
            if def.rewards.len() != alphabet.size() {
                issues.push(
                    "betting.rewards",
                    format!(
                        "{} rows for {} outcomes",
                        def.rewards.len(),
                        alphabet.size()
                    ),
                );
                return None;
            }
            let profits: Vec<f64> = def
                .rewards
                .iter()
                .flat_map(|row| row.iter().zip(&def.stakes).map(|(r, s)| r - s))
                .collect();
            let hi = profits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = profits.iter().copied().fold(f64::INFINITY, f64::min);
            let p_max = def.p_max.unwrap_or(hi);
            let p_delta = def.p_delta.unwrap_or(p_max - lo);
            Payouts::new(def.stakes.clone(), def.rewards.clone(), p_max, p_delta)
                .map_err(|e| issues.push("betting", e))
                .ok()
        });

        let evaluation = match self.mode {
            Mode::Exact => Evaluation::Exact {
                budget: self.budget,
            },
            Mode::MonteCarlo => Evaluation::MonteCarlo {
                trials: self.trials,
                seed: self.seed,
            },
        };

        match class {
            Some(class) if issues.0.is_empty() => Ok(Experiment {
                class,
                truth: self.truth,
                horizon: self.horizon,
                evaluation,
                strategies,
                loss,
                payouts,
            }),
            _ => Err(ConfigError { issues: issues.0 }),
        }
    }
}
