//! Expectations of per-prefix quantities under the true source.
//!
//! Every bound in this crate is a sum over `k` of a `μ`-expectation over
//! prefixes `x_{<k}`. Two evaluators compute such sums:
//!
//! * exact: depth-first enumeration of every prefix with `μ(x_{<k}) > 0`,
//!   each visit weighted by `μ(x_{<k})`;
//! * Monte-Carlo: independent sample paths drawn from `μ`, each visit
//!   weighted by one. The per-prefix quantity itself is still evaluated in
//!   closed form, so a path estimate is unbiased for the exact sum.
//!
//! Trial `t` under master seed `s` uses `ChaCha8Rng::seed_from_u64(s)` with
//! its stream set to `t`. Trials run in parallel in fixed-size batches and
//! are merged in trial order, so results do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mixture::{MixtureState, ModelClass};
use crate::numeric::RunningStats;
use crate::source::{draw_symbol, Symbol};

/// One prefix `x_{<k}` as seen by a per-step quantity.
#[derive(Debug)]
pub struct Node<'s> {
    /// 1-based index of the symbol about to be predicted.
    pub k: usize,
    pub prefix: &'s [Symbol],
    /// `μ(x_{<k})` when enumerating; `1` on a sampled path.
    pub weight: f64,
    /// `μ(x_{<k} ▸ ·)`.
    pub mu: &'s [f64],
    /// `ξ(x_{<k} ▸ ·)`.
    pub xi: &'s [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Exact { budget: u64 },
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Per-step expectations and their running totals over `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    pub per_step: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Standard error of each cumulative entry; zero for exact ledgers.
    pub std_error: Vec<f64>,
    pub flavor: Flavor,
}

impl Ledger {
    fn exact(per_step: Vec<f64>) -> Self {
        let cumulative = per_step
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        let std_error = vec![0.0; per_step.len()];
        Self {
            per_step,
            cumulative,
            std_error,
            flavor: Flavor::Exact,
        }
    }

    pub fn horizon(&self) -> usize {
        self.per_step.len()
    }

    /// Cumulative value after `n` steps; zero for `n = 0`.
    pub fn at(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.cumulative[n - 1]
        }
    }

    pub fn std_error_at(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.std_error[n - 1]
        }
    }

    pub fn total(&self) -> f64 {
        self.at(self.horizon())
    }

    pub fn total_std_error(&self) -> f64 {
        self.std_error_at(self.horizon())
    }
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Visits every prefix `x_{<k}`, `k = 1..=n`, with `μ(x_{<k}) > 0`.
///
/// Children are visited in increasing symbol order. Returns the number of
/// visited prefixes; fails once more than `budget` would be needed.
pub fn walk_exact<F>(
    class: &ModelClass,
    truth: usize,
    n: usize,
    budget: u64,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&Node),
{
    class.check_index(truth)?;
    let mut visited = 0;
    let mut xi = vec![0.0; class.alphabet().size()];
    descend(
        &MixtureState::init(class),
        truth,
        n,
        budget,
        &mut visited,
        &mut xi,
        &mut visit,
    )?;
    Ok(visited)
}

fn descend<F: FnMut(&Node)>(
    state: &MixtureState,
    truth: usize,
    n: usize,
    budget: u64,
    visited: &mut u64,
    xi: &mut Vec<f64>,
    visit: &mut F,
) -> Result<()> {
    let k = state.len() + 1;
    if k > n {
        return Ok(());
    }
    *visited += 1;
    if *visited > budget {
        return Err(Error::EnumerationTooLarge { budget });
    }
    let mu = state.model_conditional(truth);
    state.next_distribution_into(xi)?;
    visit(&Node {
        k,
        prefix: state.prefix(),
        weight: state.log_marginals()[truth].exp(),
        mu,
        xi,
    });
    for (a, &p) in mu.iter().enumerate() {
        if p > 0.0 {
            let mut child = state.clone();
            child.observe_unchecked(a);
            descend(&child, truth, n, budget, visited, xi, visit)?;
        }
    }
    Ok(())
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Walks one path `x_{1:n}` drawn from model `truth`.
pub fn walk_sampled<F, R>(
    class: &ModelClass,
    truth: usize,
    n: usize,
    rng: &mut R,
    mut visit: F,
) -> Result<Vec<Symbol>>
where
    F: FnMut(&Node),
    R: Rng + ?Sized,
{
    class.check_index(truth)?;
    let mut state = MixtureState::init(class);
    let mut xi = vec![0.0; class.alphabet().size()];
    for k in 1..=n {
        state.next_distribution_into(&mut xi)?;
        let mu = state.model_conditional(truth);
        visit(&Node {
            k,
            prefix: state.prefix(),
            weight: 1.0,
            mu,
            xi: &xi,
        });
        let next = draw_symbol(mu, rng.random::<f64>());
        state.observe_unchecked(next);
    }
    Ok(state.prefix().to_vec())
}

const TRIAL_BATCH: u64 = 256;

/// Expected per-step values of `quantities` functions, one ledger each.
///
/// `per_step(node, out)` writes the `quantities` values at `node` into `out`.
pub fn expectations<F>(
    class: &ModelClass,
    truth: usize,
    n: usize,
    evaluation: Evaluation,
    quantities: usize,
    per_step: F,
) -> Result<Vec<Ledger>>
where
    F: Fn(&Node, &mut [f64]) + Sync,
{
    match evaluation {
        Evaluation::Exact { budget } => {
            let mut sums = vec![vec![0.0; n]; quantities];
            let mut values = vec![0.0; quantities];
            walk_exact(class, truth, n, budget, |node| {
                per_step(node, &mut values);
                for (sum, v) in sums.iter_mut().zip(&values) {
                    sum[node.k - 1] += node.weight * v;
                }
            })?;
            Ok(sums.into_iter().map(Ledger::exact).collect())
        }
        Evaluation::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidInput(
                    "Monte-Carlo needs at least one trial".into(),
                ));
            }
            let mut step_stats = vec![vec![RunningStats::default(); n]; quantities];
            let mut total_stats = vec![vec![RunningStats::default(); n]; quantities];
            let mut start = 0;
            while start < trials {
                let end = (start + TRIAL_BATCH).min(trials);
                let paths: Vec<Vec<f64>> = (start..end)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(seed, t);
                        let mut rows = vec![0.0; quantities * n];
                        let mut values = vec![0.0; quantities];
                        walk_sampled(class, truth, n, &mut rng, |node| {
                            per_step(node, &mut values);
                            for (q, v) in values.iter().enumerate() {
                                rows[q * n + node.k - 1] = *v;
                            }
                        })
                        .map(|_| rows)
                    })
                    .collect::<Result<_>>()?;
                for rows in &paths {
                    for q in 0..quantities {
                        let mut acc = 0.0;
                        for k in 0..n {
                            let v = rows[q * n + k];
                            acc += v;
                            step_stats[q][k].push(v);
                            total_stats[q][k].push(acc);
                        }
                    }
                }
                start = end;
            }
            Ok(step_stats
                .into_iter()
                .zip(total_stats)
                .map(|(steps, totals)| Ledger {
                    per_step: steps.iter().map(RunningStats::mean).collect(),
                    cumulative: totals.iter().map(RunningStats::mean).collect(),
                    std_error: totals.iter().map(RunningStats::std_error).collect(),
                    flavor: Flavor::MonteCarlo { trials, seed },
                })
                .collect())
        }
    }
}
