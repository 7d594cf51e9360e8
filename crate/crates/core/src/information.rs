//! Relative-entropy instruments.
//!
//! `h_k` is the KL divergence of `ξ`'s next-symbol distribution from `μ`'s at
//! a prefix, `H_n` its `μ`-expected sum over the first `n` steps, and `D_n` the
//! matching sum of squared distances. With the truth in the class,
//! `D_n ≤ H_n ≤ ln(1/w_μ)`.
//!
//! All entropies are in nats. A zero `μ` term contributes nothing even when
//! the `ξ` term is zero too; a positive `μ` term against a zero `ξ` term makes
//! the divergence `+inf`, which ledgers carry through unchanged.

use crate::engine::{expectations, Evaluation, Ledger};
use crate::error::{Error, Result};
use crate::mixture::ModelClass;
use crate::source::validate_distribution;
use crate::tolerance::TOL;

/// `Σ_a μ_a ln(μ_a / ξ_a)`.
pub fn step_kl(mu: &[f64], xi: &[f64]) -> f64 {
    debug_assert_eq!(mu.len(), xi.len());
    mu.iter()
        .zip(xi)
        .map(|(&y, &z)| {
            if y <= 0.0 {
                0.0
            } else if z <= 0.0 {
                f64::INFINITY
            } else {
                y * (y / z).ln()
            }
        })
        .sum()
}

/// True when `μ` puts mass where `ξ` puts none, i.e. [`step_kl`] is infinite.
pub fn dominance_violated(mu: &[f64], xi: &[f64]) -> bool {
    mu.iter().zip(xi).any(|(&y, &z)| y > 0.0 && z <= 0.0)
}

/// `Σ_a (μ_a − ξ_a)²`.
pub fn step_sq(mu: &[f64], xi: &[f64]) -> f64 {
    mu.iter().zip(xi).map(|(y, z)| (y - z) * (y - z)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    /// `Σ (y_i − z_i)²`
    pub lhs: f64,
    /// `Σ y_i ln(y_i / z_i)`
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    /// `rhs − lhs`; `+inf` when the divergence is infinite.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Evaluates both sides of `Σ (y_i − z_i)² ≤ Σ y_i ln(y_i / z_i)`.
pub fn check_entropy_inequality(y: &[f64], z: &[f64]) -> Result<InequalityCheck> {
    if y.len() < 2 {
        return Err(Error::AlphabetTooSmall(y.len()));
    }
    validate_distribution(y, y.len(), TOL.mixture)?;
    validate_distribution(z, y.len(), TOL.mixture)?;
    let lhs = step_sq(y, z);
    let rhs = step_kl(y, z);
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + TOL.entropy_inequality,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoLedger {
    /// `h_k` per step, cumulative `H_n`.
    pub relative_entropy: Ledger,
    /// `E_μ[Σ_a (μ − ξ)²]` per step, cumulative `D_n`.
    pub squared_distance: Ledger,
    /// `ln(1/w_μ)`.
    pub d_mu: f64,
    pub dominance_violated: bool,
}

impl InfoLedger {
    pub fn entropy(&self, n: usize) -> f64 {
        self.relative_entropy.at(n)
    }

    pub fn sq_distance(&self, n: usize) -> f64 {
        self.squared_distance.at(n)
    }
}

/// `h_k`, `H_n` and `D_n` under either evaluator.
pub fn accumulate(
    class: &ModelClass,
    truth: usize,
    n: usize,
    evaluation: Evaluation,
) -> Result<InfoLedger> {
    class.check_index(truth)?;
    let mut ledgers = expectations(class, truth, n, evaluation, 2, |node, out| {
        out[0] = step_kl(node.mu, node.xi);
        out[1] = step_sq(node.mu, node.xi);
    })?
    .into_iter();
    let relative_entropy = ledgers.next().expect("two ledgers");
    let squared_distance = ledgers.next().expect("two ledgers");
    let dominance_violated = relative_entropy.per_step.iter().any(|h| h.is_infinite());
    Ok(InfoLedger {
        relative_entropy,
        squared_distance,
        d_mu: class.entropy_budget(truth),
        dominance_violated,
    })
}

/// `h_k`, `H_n` and `D_n` by enumerating every prefix the truth can emit.
pub fn accumulate_exact(
    class: &ModelClass,
    truth: usize,
    n: usize,
    budget: u64,
) -> Result<InfoLedger> {
    accumulate(class, truth, n, Evaluation::Exact { budget })
}

/// Sample-path estimates of the same ledger.
pub fn accumulate_mc(
    class: &ModelClass,
    truth: usize,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<InfoLedger> {
    accumulate(class, truth, n, Evaluation::MonteCarlo { trials, seed })
}
