//! Alphabets, sequences and the next-symbol source interface.
//!
//! A [`Source`] is a probability distribution over infinite sequences,
//! exposed only through its conditional next-symbol probabilities. Joint
//! probabilities follow from the chain rule and are always accumulated in log
//! space, since products over a few hundred symbols underflow `f64`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Dense symbol index in `0..alphabet.size()`.
pub type Symbol = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check(&self, symbol: Symbol) -> Result<()> {
        if symbol < self.size {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                symbol,
                size: self.size,
            })
        }
    }

    pub fn symbols(&self) -> std::ops::Range<Symbol> {
        0..self.size
    }
}

/// A finite string `x_1..x_n` over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self> {
        for &s in &symbols {
            alphabet.check(s)?;
        }
        Ok(Self { alphabet, symbols })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            symbols: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn push(&mut self, symbol: Symbol) -> Result<()> {
        self.alphabet.check(symbol)?;
        self.symbols.push(symbol);
        Ok(())
    }

    /// The prefix `x_{<k}` (first `k - 1` symbols), 1-based like the chain rule.
    pub fn before(&self, k: usize) -> &[Symbol] {
        &self.symbols[..k.saturating_sub(1).min(self.symbols.len())]
    }
}

/// Conditional next-symbol probabilities of a distribution over sequences.
///
/// Implementations must return a probability vector (entries in `[0, 1]`
/// summing to one) for every prefix, including prefixes the source itself
/// assigns probability zero. Sources are immutable and shareable across
/// threads.
pub trait Source: Send + Sync {
    fn alphabet(&self) -> Alphabet;

    /// Writes `ρ(prefix ▸ a)` for every symbol `a` into `out`.
    ///
    /// `prefix` is trusted to contain valid symbols and `out` to have
    /// `alphabet().size()` entries.
    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]);

    fn next_distribution(&self, prefix: &[Symbol]) -> Vec<f64> {
        let mut out = vec![0.0; self.alphabet().size()];
        self.next_distribution_into(prefix, &mut out);
        out
    }
}

impl<S: Source + ?Sized> Source for &S {
    fn alphabet(&self) -> Alphabet {
        (**self).alphabet()
    }

    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]) {
        (**self).next_distribution_into(prefix, out)
    }
}

fn check_prefix(source: &dyn Source, prefix: &Sequence) -> Result<()> {
    let alphabet = source.alphabet();
    if prefix.alphabet() != alphabet {
        return Err(Error::InvalidInput(format!(
            "sequence over {} symbols used with a source over {}",
            prefix.alphabet().size(),
            alphabet.size()
        )));
    }
    Ok(())
}

/// `ρ(x_{<k} ▸ x_k)`.
pub fn conditional(source: &dyn Source, prefix: &Sequence, next: Symbol) -> Result<f64> {
    check_prefix(source, prefix)?;
    source.alphabet().check(next)?;
    Ok(source.next_distribution(prefix.symbols())[next])
}

/// `ln ρ(x_{1:n})` by the chain rule; `-inf` once any factor is zero.
pub fn log_joint(source: &dyn Source, x: &Sequence) -> Result<f64> {
    check_prefix(source, x)?;
    Ok(log_joint_unchecked(source, x.symbols()))
}

pub(crate) fn log_joint_unchecked(source: &dyn Source, x: &[Symbol]) -> f64 {
    let mut dist = vec![0.0; source.alphabet().size()];
    let mut acc = 0.0;
    for (k, &sym) in x.iter().enumerate() {
        source.next_distribution_into(&x[..k], &mut dist);
        let p = dist[sym];
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += p.ln();
    }
    acc
}

/// `ρ(x_{1:n})`; the empty sequence has probability one.
pub fn joint(source: &dyn Source, x: &Sequence) -> Result<f64> {
    log_joint(source, x).map(f64::exp)
}

/// Inverse-CDF draw from a probability vector given `u ∈ [0, 1)`.
///
/// Rounding can leave the cumulative sum just short of `u`; the last symbol
/// with positive mass absorbs that remainder.
pub fn draw_symbol(dist: &[f64], u: f64) -> Symbol {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (a, &p) in dist.iter().enumerate() {
        if p > 0.0 {
            last_positive = a;
            acc += p;
            if u < acc {
                return a;
            }
        }
    }
    last_positive
}

/// Draws `x_{1:n}` from the source, one conditional at a time.
pub fn sample<R: Rng + ?Sized>(source: &dyn Source, n: usize, rng: &mut R) -> Sequence {
    let alphabet = source.alphabet();
    let mut symbols = Vec::with_capacity(n);
    let mut dist = vec![0.0; alphabet.size()];
    for _ in 0..n {
        source.next_distribution_into(&symbols, &mut dist);
        symbols.push(draw_symbol(&dist, rng.random::<f64>()));
    }
    Sequence { alphabet, symbols }
}

/// Checks that `p` is a probability vector of length `n` within `tol`.
pub fn validate_distribution(p: &[f64], n: usize, tol: f64) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidDistribution(format!(
            "expected {n} entries, got {}",
            p.len()
        )));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {bad} outside [0, 1]"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Independent draws from one categorical distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct IidCategorical {
    probabilities: Vec<f64>,
}

impl IidCategorical {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(probabilities.len())?;
        validate_distribution(&probabilities, alphabet.size(), TOL.normalization)
            .map_err(|e| Error::InvalidModel(format!("iid: {e}")))?;
        Ok(Self { probabilities })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.size();
        Self {
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

impl Source for IidCategorical {
    fn alphabet(&self) -> Alphabet {
        Alphabet {
            size: self.probabilities.len(),
        }
    }

    fn next_distribution_into(&self, _prefix: &[Symbol], out: &mut [f64]) {
        out.copy_from_slice(&self.probabilities);
    }
}

/// Order-`m` Markov chain.
///
/// Row `r` of the transition table is the context whose last `m` symbols,
/// read oldest first, are the base-`N` digits of `r`. Until `m` symbols have
/// been seen the chain emits i.i.d. draws from `initial`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    order: usize,
    transitions: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

impl MarkovChain {
    pub fn new(order: usize, transitions: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(initial.len())?;
        let n = alphabet.size();
        if order == 0 {
            return Err(Error::InvalidModel(
                "markov: order must be at least 1".into(),
            ));
        }
        let rows = u32::try_from(order)
            .ok()
            .and_then(|m| n.checked_pow(m))
            .ok_or_else(|| Error::InvalidModel("markov: context table too large".into()))?;
        if transitions.len() != rows {
            return Err(Error::InvalidModel(format!(
                "markov: order {order} over {n} symbols needs {rows} rows, got {}",
                transitions.len()
            )));
        }
        validate_distribution(&initial, n, TOL.normalization)
            .map_err(|e| Error::InvalidModel(format!("markov initial: {e}")))?;
        for (r, row) in transitions.iter().enumerate() {
            validate_distribution(row, n, TOL.normalization)
                .map_err(|e| Error::InvalidModel(format!("markov row {r}: {e}")))?;
        }
        Ok(Self {
            order,
            transitions,
            initial,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    fn context_row(&self, prefix: &[Symbol]) -> usize {
        let n = self.initial.len();
        prefix[prefix.len() - self.order..]
            .iter()
            .fold(0, |row, &s| row * n + s)
    }
}

impl Source for MarkovChain {
    fn alphabet(&self) -> Alphabet {
        Alphabet {
            size: self.initial.len(),
        }
    }

    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]) {
        if prefix.len() < self.order {
            out.copy_from_slice(&self.initial);
        } else {
            out.copy_from_slice(&self.transitions[self.context_row(prefix)]);
        }
    }
}

/// Repeats a fixed pattern forever with probability one.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicPeriodic {
    alphabet: Alphabet,
    pattern: Vec<Symbol>,
}

impl DeterministicPeriodic {
    pub fn new(alphabet: Alphabet, pattern: Vec<Symbol>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidModel("periodic: empty pattern".into()));
        }
        for &s in &pattern {
            alphabet
                .check(s)
                .map_err(|e| Error::InvalidModel(format!("periodic: {e}")))?;
        }
        Ok(Self { alphabet, pattern })
    }

    pub fn pattern(&self) -> &[Symbol] {
        &self.pattern
    }

    /// The symbol emitted at 0-based position `i`.
    pub fn symbol_at(&self, i: usize) -> Symbol {
        self.pattern[i % self.pattern.len()]
    }
}

impl Source for DeterministicPeriodic {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]) {
        out.fill(0.0);
        out[self.symbol_at(prefix.len())] = 1.0;
    }
}

/// The concrete source families a model class is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    Iid(IidCategorical),
    Markov(MarkovChain),
    Periodic(DeterministicPeriodic),
}

impl ModelFamily {
    pub fn iid(probabilities: Vec<f64>) -> Result<Self> {
        IidCategorical::new(probabilities).map(Self::Iid)
    }

    pub fn markov(order: usize, transitions: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        MarkovChain::new(order, transitions, initial).map(Self::Markov)
    }

    pub fn periodic(alphabet: Alphabet, pattern: Vec<Symbol>) -> Result<Self> {
        DeterministicPeriodic::new(alphabet, pattern).map(Self::Periodic)
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Periodic(_))
    }

    fn inner(&self) -> &dyn Source {
        match self {
            Self::Iid(m) => m,
            Self::Markov(m) => m,
            Self::Periodic(m) => m,
        }
    }
}

impl Source for ModelFamily {
    fn alphabet(&self) -> Alphabet {
        self.inner().alphabet()
    }

    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]) {
        self.inner().next_distribution_into(prefix, out)
    }
}
