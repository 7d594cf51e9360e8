//! Loss-minimizing actions and games of chance.
//!
//! `Λ_ρ` takes the action with the smallest `ρ`-expected loss. With the 0/1
//! error loss over `Y = A` it reduces to the argmax predictor. Betting is the
//! special case where the loss is the negative profit of a round.

use crate::engine::{expectations, Evaluation, Ledger};
use crate::error::{Error, Result};
use crate::mixture::ModelClass;
use crate::numeric::argmin;
use crate::prediction::Scheme;
use crate::source::{Alphabet, Sequence, Source, Symbol};

pub type LossLedger = Ledger;

/// `l[x][y]`: loss of action `y` when the outcome is `x`, bounded in
/// `[l_min, l_min + l_Δ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    outcomes: usize,
    actions: usize,
    table: Vec<f64>,
    l_min: f64,
    l_delta: f64,
}

impl LossMatrix {
    /// Rows are outcomes, columns actions.
    pub fn new(rows: Vec<Vec<f64>>, l_min: f64, l_delta: f64) -> Result<Self> {
        let outcomes = rows.len();
        let actions = rows.first().map_or(0, Vec::len);
        if outcomes < 2 {
            return Err(Error::InvalidLoss(
                "need a row per outcome (at least 2)".into(),
            ));
        }
        if actions == 0 {
            return Err(Error::InvalidLoss("need at least one action".into()));
        }
        if rows.iter().any(|r| r.len() != actions) {
            return Err(Error::InvalidLoss("rows have different lengths".into()));
        }
        if !(l_delta >= 0.0 && l_delta.is_finite() && l_min.is_finite()) {
            return Err(Error::InvalidLoss(format!(
                "range [{l_min}, {l_min} + {l_delta}] is not valid"
            )));
        }
        let table: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(v) = table
            .iter()
            .find(|v| !(**v >= l_min && **v <= l_min + l_delta))
        {
            return Err(Error::InvalidLoss(format!(
                "entry {v} outside declared range [{l_min}, {}]",
                l_min + l_delta
            )));
        }
        Ok(Self {
            outcomes,
            actions,
            table,
            l_min,
            l_delta,
        })
    }

    /// Declares the tightest range containing every entry.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let lo = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = rows
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut delta = hi - lo;
        while lo + delta < hi {
            delta = delta.next_up();
        }
        Self::new(rows, lo, delta)
    }

    /// 0/1 loss with one action per symbol.
    pub fn error_loss(alphabet: Alphabet) -> Self {
        let n = alphabet.size();
        let rows = (0..n)
            .map(|x| (0..n).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows, 0.0, 1.0).expect("0/1 loss is valid")
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn l_min(&self) -> f64 {
        self.l_min
    }

    pub fn l_delta(&self) -> f64 {
        self.l_delta
    }

    pub fn loss(&self, outcome: Symbol, action: usize) -> f64 {
        self.table[outcome * self.actions + action]
    }

    /// `Σ_x ρ_x l[x][action]`.
    pub fn expected(&self, dist: &[f64], action: usize) -> f64 {
        dist.iter()
            .enumerate()
            .map(|(x, &p)| p * self.loss(x, action))
            .sum()
    }

    fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        if self.outcomes == alphabet.size() {
            Ok(())
        } else {
            Err(Error::InvalidLoss(format!(
                "{} outcome rows for an alphabet of {}",
                self.outcomes,
                alphabet.size()
            )))
        }
    }
}

/// Which steps `k` (1-based) carry a loss. Steps that do not are charged
/// zero regardless of the action.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StepMask {
    #[default]
    All,
    /// Only steps that are multiples of `m`.
    Every(usize),
    /// `mask[k - 1]`; steps past the end are inactive.
    Explicit(Vec<bool>),
}

impl StepMask {
    pub fn active(&self, k: usize) -> bool {
        match self {
            Self::All => true,
            Self::Every(m) => *m > 0 && k.is_multiple_of(*m),
            Self::Explicit(mask) => mask.get(k - 1).copied().unwrap_or(false),
        }
    }

    /// `(l_min, l_Δ)` widened to include the zero charged on masked steps.
    pub fn effective_range(&self, loss: &LossMatrix, n: usize) -> (f64, f64) {
        if (1..=n).all(|k| self.active(k)) {
            return (loss.l_min, loss.l_delta);
        }
        let lo = loss.l_min.min(0.0);
        let hi = (loss.l_min + loss.l_delta).max(0.0);
        (lo, hi - lo)
    }
}

/// `argmin_y Σ_x ρ_x l[x][y]`, lowest action on ties.
pub fn act_from(dist: &[f64], loss: &LossMatrix) -> usize {
    let expected: Vec<f64> = (0..loss.actions).map(|y| loss.expected(dist, y)).collect();
    argmin(&expected)
}

/// `y^{Λ_ρ}` at `prefix`.
pub fn act(strategy: &dyn Source, prefix: &Sequence, loss: &LossMatrix) -> Result<usize> {
    loss.check_alphabet(strategy.alphabet())?;
    if prefix.alphabet() != strategy.alphabet() {
        return Err(Error::InvalidInput(
            "prefix alphabet differs from the strategy's".into(),
        ));
    }
    Ok(act_from(
        &strategy.next_distribution(prefix.symbols()),
        loss,
    ))
}

/// Loss ledgers for every (loss, scheme) pair, indexed `[loss][scheme]`, from
/// a single traversal.
pub fn expected_losses(
    class: &ModelClass,
    truth: usize,
    schemes: &[Scheme],
    losses: &[LossMatrix],
    mask: &StepMask,
    n: usize,
    evaluation: Evaluation,
) -> Result<Vec<Vec<LossLedger>>> {
    class.check_index(truth)?;
    for loss in losses {
        loss.check_alphabet(class.alphabet())?;
    }
    let size = class.alphabet().size();
    let per_loss = schemes.len();
    let flat = expectations(
        class,
        truth,
        n,
        evaluation,
        losses.len() * per_loss,
        |node, out| {
            if !mask.active(node.k) {
                out.fill(0.0);
                return;
            }
            let mut scratch = vec![0.0; size];
            for (s, scheme) in schemes.iter().enumerate() {
                let dist = scheme.distribution(node, &mut scratch);
                for (l, loss) in losses.iter().enumerate() {
                    let action = act_from(dist, loss);
                    out[l * per_loss + s] = loss.expected(node.mu, action);
                }
            }
        },
    )?;
    let mut flat = flat.into_iter();
    Ok((0..losses.len())
        .map(|_| flat.by_ref().take(per_loss).collect())
        .collect())
}

pub fn expected_loss_exact(
    class: &ModelClass,
    truth: usize,
    scheme: Scheme,
    loss: &LossMatrix,
    mask: &StepMask,
    n: usize,
    budget: u64,
) -> Result<LossLedger> {
    let evaluation = Evaluation::Exact { budget };
    let mut out = expected_losses(
        class,
        truth,
        &[scheme],
        std::slice::from_ref(loss),
        mask,
        n,
        evaluation,
    )?;
    Ok(out.remove(0).remove(0))
}

#[allow(clippy::too_many_arguments)]
pub fn expected_loss_mc(
    class: &ModelClass,
    truth: usize,
    scheme: Scheme,
    loss: &LossMatrix,
    mask: &StepMask,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<LossLedger> {
    let evaluation = Evaluation::MonteCarlo { trials, seed };
    let mut out = expected_losses(
        class,
        truth,
        &[scheme],
        std::slice::from_ref(loss),
        mask,
        n,
        evaluation,
    )?;
    Ok(out.remove(0).remove(0))
}

/// `l_Δ H + √(4 (L_μ − n l_min) l_Δ H + l_Δ² H²)` for an explicit range.
pub fn loss_bound_with_range(l_mu: f64, n: usize, h: f64, l_min: f64, l_delta: f64) -> Result<f64> {
    let floor = n as f64 * l_min;
    let excess = l_mu - floor;
    if excess < -1e-9 * floor.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "informed loss {l_mu} below the minimum possible {floor}"
        )));
    }
    let excess = excess.max(0.0);
    let h = h.max(0.0);
    Ok(l_delta * h + (4.0 * excess * l_delta * h + l_delta * l_delta * h * h).sqrt())
}

/// Upper bound on `L_{nΛ_ξ} − L_{nΛ_μ}`.
pub fn loss_bound(l_mu: f64, n: usize, h: f64, loss: &LossMatrix) -> Result<f64> {
    loss_bound_with_range(l_mu, n, h, loss.l_min, loss.l_delta)
}

/// One round of a game of chance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetRound {
    pub stake: f64,
    pub action: usize,
    pub outcome: Symbol,
    pub reward: f64,
    pub profit: f64,
}

/// Stakes per action and rewards per (outcome, action).
#[derive(Debug, Clone, PartialEq)]
pub struct Payouts {
    stakes: Vec<f64>,
    rewards: Vec<Vec<f64>>,
    p_max: f64,
    p_delta: f64,
}

impl Payouts {
    /// Profits `r − s` must lie in `[p_max − p_Δ, p_max]`.
    pub fn new(stakes: Vec<f64>, rewards: Vec<Vec<f64>>, p_max: f64, p_delta: f64) -> Result<Self> {
        if stakes.is_empty() {
            return Err(Error::InvalidLoss("no actions to bet on".into()));
        }
        if rewards.iter().any(|r| r.len() != stakes.len()) {
            return Err(Error::InvalidLoss(
                "every reward row needs one entry per action".into(),
            ));
        }
        if !(p_delta >= 0.0 && p_delta.is_finite() && p_max.is_finite()) {
            return Err(Error::InvalidLoss(format!(
                "invalid profit range p_Δ = {p_delta}"
            )));
        }
        let payouts = Self {
            stakes,
            rewards,
            p_max,
            p_delta,
        };
        for x in 0..payouts.rewards.len() {
            for y in 0..payouts.stakes.len() {
                let p = payouts.profit(x, y);
                if !(p <= p_max && p >= p_max - p_delta) {
                    return Err(Error::InvalidLoss(format!(
                        "profit {p} for outcome {x}, action {y} outside [{}, {p_max}]",
                        p_max - p_delta
                    )));
                }
            }
        }
        Ok(payouts)
    }

    /// Stake 1 on one outcome, get 2 back if it occurs.
    pub fn even_money(alphabet: Alphabet, targets: &[Symbol]) -> Result<Self> {
        let stakes = vec![1.0; targets.len()];
        let rewards = alphabet
            .symbols()
            .map(|x| {
                targets
                    .iter()
                    .map(|&t| if t == x { 2.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::new(stakes, rewards, 1.0, 2.0)
    }

    pub fn profit(&self, outcome: Symbol, action: usize) -> f64 {
        self.rewards[outcome][action] - self.stakes[action]
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn p_delta(&self) -> f64 {
        self.p_delta
    }

    pub fn round(&self, action: usize, outcome: Symbol) -> BetRound {
        BetRound {
            stake: self.stakes[action],
            action,
            outcome,
            reward: self.rewards[outcome][action],
            profit: self.profit(outcome, action),
        }
    }

    /// `l[x][y] = −p(x, y)` over `[−p_max, −p_max + p_Δ]`.
    pub fn to_loss(&self) -> Result<LossMatrix> {
        let rows = (0..self.rewards.len())
            .map(|x| (0..self.stakes.len()).map(|y| -self.profit(x, y)).collect())
            .collect();
        LossMatrix::new(rows, -self.p_max, self.p_delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BettingReport {
    /// `p̄_{nΛ_ξ}` for `n = 1..`.
    pub avg_profit_xi: Vec<f64>,
    /// `p̄_{nΛ_μ}` for `n = 1..`.
    pub avg_profit_mu: Vec<f64>,
    pub avg_profit_xi_se: Vec<f64>,
    pub avg_profit_mu_se: Vec<f64>,
    /// First `n` with `p̄_{nΛ_ξ} > 0`.
    pub crossing_n: Option<usize>,
    /// `(2 p_Δ / p̄_{NΛ_μ})² · d_μ` at the largest `N`, when that average is positive.
    pub crossing_bound: Option<f64>,
    pub p_delta: f64,
    pub d_mu: f64,
}

impl BettingReport {
    pub fn final_avg_profit_mu(&self) -> f64 {
        self.avg_profit_mu.last().copied().unwrap_or(0.0)
    }
}

/// Expected average profits of `Λ_ξ` and `Λ_μ` under any evaluator.
pub fn betting_profile(
    class: &ModelClass,
    truth: usize,
    payouts: &Payouts,
    n: usize,
    evaluation: Evaluation,
) -> Result<BettingReport> {
    let loss = payouts.to_loss()?;
    let mut ledgers = expected_losses(
        class,
        truth,
        &[Scheme::Universal, Scheme::Informed],
        std::slice::from_ref(&loss),
        &StepMask::All,
        n,
        evaluation,
    )?
    .remove(0)
    .into_iter();
    let xi = ledgers.next().expect("two schemes");
    let mu = ledgers.next().expect("two schemes");
    let average = |ledger: &Ledger| -> (Vec<f64>, Vec<f64>) {
        (1..=n)
            .map(|k| (-ledger.at(k) / k as f64, ledger.std_error_at(k) / k as f64))
            .unzip()
    };
    let (avg_profit_xi, avg_profit_xi_se) = average(&xi);
    let (avg_profit_mu, avg_profit_mu_se) = average(&mu);
    let crossing_n = avg_profit_xi.iter().position(|&p| p > 0.0).map(|i| i + 1);
    let d_mu = class.entropy_budget(truth);
    let p_delta = payouts.p_delta;
    let crossing_bound = avg_profit_mu
        .last()
        .filter(|&&p| p > 0.0)
        .map(|&p| (2.0 * p_delta / p).powi(2) * d_mu);
    Ok(BettingReport {
        avg_profit_xi,
        avg_profit_mu,
        avg_profit_xi_se,
        avg_profit_mu_se,
        crossing_n,
        crossing_bound,
        p_delta,
        d_mu,
    })
}

/// Monte-Carlo betting run; one seeded stream per trial.
pub fn simulate_betting(
    class: &ModelClass,
    truth: usize,
    payouts: &Payouts,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<BettingReport> {
    betting_profile(
        class,
        truth,
        payouts,
        n,
        Evaluation::MonteCarlo { trials, seed },
    )
}
