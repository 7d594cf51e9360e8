//! Argmax prediction and expected-error processes.
//!
//! `Θ_ρ` predicts the symbol with the highest `ρ`-conditional probability,
//! lowest index on ties. Its error at a prefix is `1 − μ(x_{<k} ▸ x_k^Θ)` and
//! `E_n` is the `μ`-expected sum over the first `n` steps.

use std::fmt;

use crate::engine::{expectations, Evaluation, Ledger, Node};
use crate::error::Result;
use crate::mixture::ModelClass;
use crate::numeric::argmax;
use crate::source::{Sequence, Source, Symbol};

pub type ErrorLedger = Ledger;

/// Which conditional a scheme acts on.
#[derive(Clone, Copy)]
pub enum Scheme<'a> {
    /// The true source `μ`.
    Informed,
    /// The mixture `ξ`.
    Universal,
    /// Any other source `ρ` over the same alphabet.
    Custom(&'a dyn Source),
}

impl fmt::Debug for Scheme<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Informed => f.write_str("Informed"),
            Self::Universal => f.write_str("Universal"),
            Self::Custom(s) => write!(f, "Custom(N={})", s.alphabet().size()),
        }
    }
}

impl Scheme<'_> {
    /// The scheme's next-symbol distribution at `node`.
    pub fn distribution<'n>(&self, node: &'n Node, scratch: &'n mut [f64]) -> &'n [f64] {
        match self {
            Self::Informed => node.mu,
            Self::Universal => node.xi,
            Self::Custom(source) => {
                source.next_distribution_into(node.prefix, scratch);
                scratch
            }
        }
    }
}

/// `Θ_ρ` for a fixed strategy `ρ`.
#[derive(Clone, Copy)]
pub struct Predictor<'a> {
    strategy: &'a dyn Source,
}

impl<'a> Predictor<'a> {
    pub fn new(strategy: &'a dyn Source) -> Self {
        Self { strategy }
    }

    pub fn predict(&self, prefix: &Sequence) -> Result<Symbol> {
        if prefix.alphabet() != self.strategy.alphabet() {
            return Err(crate::Error::InvalidInput(
                "prefix alphabet differs from the strategy's".into(),
            ));
        }
        Ok(predict_from(
            &self.strategy.next_distribution(prefix.symbols()),
        ))
    }
}

/// `argmax_a ρ(x_{<k} ▸ a)`, lowest symbol on ties.
pub fn predict_from(conditional: &[f64]) -> Symbol {
    argmax(conditional)
}

/// `1 − μ(x_{<k} ▸ predicted)`.
pub fn step_error(mu: &[f64], predicted: Symbol) -> f64 {
    1.0 - mu[predicted]
}

/// One error ledger per scheme, all from a single traversal.
pub fn expected_errors(
    class: &ModelClass,
    truth: usize,
    schemes: &[Scheme],
    n: usize,
    evaluation: Evaluation,
) -> Result<Vec<ErrorLedger>> {
    class.check_index(truth)?;
    for scheme in schemes {
        if let Scheme::Custom(s) = scheme {
            if s.alphabet() != class.alphabet() {
                return Err(crate::Error::InvalidInput(
                    "custom strategy alphabet differs from the class".into(),
                ));
            }
        }
    }
    let size = class.alphabet().size();
    expectations(class, truth, n, evaluation, schemes.len(), |node, out| {
        let mut scratch = vec![0.0; size];
        for (scheme, e) in schemes.iter().zip(out.iter_mut()) {
            let predicted = predict_from(scheme.distribution(node, &mut scratch));
            *e = step_error(node.mu, predicted);
        }
    })
}

pub fn expected_errors_exact(
    class: &ModelClass,
    truth: usize,
    scheme: Scheme,
    n: usize,
    budget: u64,
) -> Result<ErrorLedger> {
    let mut ledgers = expected_errors(class, truth, &[scheme], n, Evaluation::Exact { budget })?;
    Ok(ledgers.remove(0))
}

pub fn expected_errors_mc(
    class: &ModelClass,
    truth: usize,
    scheme: Scheme,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<ErrorLedger> {
    let evaluation = Evaluation::MonteCarlo { trials, seed };
    let mut ledgers = expected_errors(class, truth, &[scheme], n, evaluation)?;
    Ok(ledgers.remove(0))
}

/// Upper bounds on `E_{nΘ_ξ} − E_{nΘ_μ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// `H + √(4·E·H + H²)`
    pub tight: f64,
    /// `2H + 2√(E·H)`
    pub loose: f64,
}

/// Evaluates both error-excess bounds from the informed scheme's expected
/// errors and the relative entropy. Negative inputs (rounding residue) are
/// treated as zero.
pub fn error_excess_bound(e_mu: f64, h: f64) -> ErrorBound {
    let e = e_mu.max(0.0);
    let h = h.max(0.0);
    ErrorBound {
        tight: h + (4.0 * e * h + h * h).sqrt(),
        loose: 2.0 * h + 2.0 * (e * h).sqrt(),
    }
}
