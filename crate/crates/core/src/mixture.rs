//! The Bayes mixture `ξ = Σ w_i μ_i` over a finite model class.
//!
//! [`MixtureState`] carries every model's log-marginal `ln μ_i(x_{<k})` and
//! `ln ξ(x_{<k})` for the prefix observed so far. Models that assign the
//! prefix probability zero keep a `-inf` log-marginal and posterior weight
//! zero; they are never removed, so model indices are stable for the whole
//! run.

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::source::{Alphabet, ModelFamily, Sequence, Source, Symbol};
use crate::tolerance::TOL;

/// A finite model class with strictly positive prior weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass {
    alphabet: Alphabet,
    models: Vec<ModelFamily>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
}

impl ModelClass {
    pub fn new(models: Vec<ModelFamily>, weights: Vec<f64>) -> Result<Self> {
        let first = models
            .first()
            .ok_or_else(|| Error::InvalidClass("empty model class".into()))?;
        let alphabet = first.alphabet();
        if let Some(i) = models.iter().position(|m| m.alphabet() != alphabet) {
            return Err(Error::InvalidClass(format!(
                "model {i} has alphabet size {}, expected {}",
                models[i].alphabet().size(),
                alphabet.size()
            )));
        }
        if weights.len() != models.len() {
            return Err(Error::InvalidClass(format!(
                "{} weights for {} models",
                weights.len(),
                models.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidClass(format!("weight {w} is not positive")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL.normalization {
            return Err(Error::InvalidClass(format!("weights sum to {sum}, not 1")));
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(Self {
            alphabet,
            models,
            weights,
            log_weights,
        })
    }

    pub fn uniform(models: Vec<ModelFamily>) -> Result<Self> {
        let w = 1.0 / models.len().max(1) as f64;
        let weights = vec![w; models.len()];
        Self::new(models, weights)
    }

    pub fn by_description_length(models: Vec<ModelFamily>) -> Result<Self> {
        let weights = weight_by_description_length(&models);
        Self::new(models, weights)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn models(&self) -> &[ModelFamily] {
        &self.models
    }

    pub fn model(&self, i: usize) -> &ModelFamily {
        &self.models[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// `d_μ = ln(1 / w_i)`, the entropy budget of model `i`.
    pub fn entropy_budget(&self, i: usize) -> f64 {
        // `0.0 -` keeps a unit weight at +0 rather than -0
        0.0 - self.log_weights[i]
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.models.len() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "model index {i} outside class of {}",
                self.models.len()
            )))
        }
    }
}

/// `ξ` as a plain [`Source`], recomputed from the prior on every call.
///
/// For a prefix every model rules out the conditional is undefined; this
/// returns the uniform distribution there.
impl Source for ModelClass {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_distribution_into(&self, prefix: &[Symbol], out: &mut [f64]) {
        let mut state = MixtureState::init(self);
        for &s in prefix {
            state.observe_unchecked(s);
        }
        if state.next_distribution_into(out).is_err() {
            out.fill(1.0 / out.len() as f64);
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixtureState<'a> {
    class: &'a ModelClass,
    prefix: Vec<Symbol>,
    log_marginals: Vec<f64>,
    log_xi: f64,
    /// Row-major `|M| × N` table of `μ_i(x_{<k} ▸ a)` for the current prefix.
    model_conditionals: Vec<f64>,
}

impl<'a> MixtureState<'a> {
    pub fn init(class: &'a ModelClass) -> Self {
        let mut state = Self {
            class,
            prefix: Vec::new(),
            log_marginals: vec![0.0; class.len()],
            log_xi: 0.0,
            model_conditionals: vec![0.0; class.len() * class.alphabet.size()],
        };
        state.refresh_conditionals();
        state
    }

    fn refresh_conditionals(&mut self) {
        let n = self.class.alphabet.size();
        for (model, row) in self
            .class
            .models
            .iter()
            .zip(self.model_conditionals.chunks_exact_mut(n))
        {
            model.next_distribution_into(&self.prefix, row);
        }
    }

    pub fn class(&self) -> &'a ModelClass {
        self.class
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// `ln ξ(x_{<k})`.
    pub fn log_xi(&self) -> f64 {
        self.log_xi
    }

    /// `ln μ_i(x_{<k})` per model, `-inf` for models that ruled the prefix out.
    pub fn log_marginals(&self) -> &[f64] {
        &self.log_marginals
    }

    /// `μ_i(x_{<k} ▸ ·)` for model `i`.
    pub fn model_conditional(&self, i: usize) -> &[f64] {
        let n = self.class.alphabet.size();
        &self.model_conditionals[i * n..(i + 1) * n]
    }

    /// `ln ξ(x_{<k}) − ln(w_i μ_i(x_{<k}))`; nonnegative by dominance.
    pub fn dominance_gaps(&self) -> Vec<f64> {
        self.class
            .log_weights
            .iter()
            .zip(&self.log_marginals)
            .map(|(lw, lm)| self.log_xi - (lw + lm))
            .collect()
    }

    /// Posterior weights `w_i μ_i(x_{<k}) / ξ(x_{<k})`.
    pub fn posterior_weights(&self) -> Result<Vec<f64>> {
        if self.log_xi == f64::NEG_INFINITY {
            return Err(Error::ImpossiblePrefix);
        }
        let mut post: Vec<f64> = self
            .class
            .log_weights
            .iter()
            .zip(&self.log_marginals)
            .map(|(lw, lm)| (lw + lm - self.log_xi).exp())
            .collect();
        let total: f64 = post.iter().sum();
        post.iter_mut().for_each(|p| *p /= total);
        Ok(post)
    }

    /// Writes `ξ(x_{<k} ▸ a)` for every `a` into `out`.
    pub fn next_distribution_into(&self, out: &mut [f64]) -> Result<()> {
        let post = self.posterior_weights()?;
        out.fill(0.0);
        for (i, &w) in post.iter().enumerate() {
            if w > 0.0 {
                for (o, &c) in out.iter_mut().zip(self.model_conditional(i)) {
                    *o += w * c;
                }
            }
        }
        Ok(())
    }

    pub fn next_distribution(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.class.alphabet.size()];
        self.next_distribution_into(&mut out)?;
        Ok(out)
    }

    /// `ξ(x_{<k} ▸ next)`, where `prefix` must be the prefix this state covers.
    pub fn xi_conditional(&self, prefix: &Sequence, next: Symbol) -> Result<f64> {
        if prefix.symbols() != self.prefix.as_slice() {
            return Err(Error::PrefixMismatch {
                state: self.prefix.len(),
                prefix: prefix.len(),
            });
        }
        self.class.alphabet.check(next)?;
        Ok(self.next_distribution()?[next])
    }

    /// Extends the prefix by one observed symbol in place.
    pub fn observe(&mut self, observed: Symbol) -> Result<()> {
        self.class.alphabet.check(observed)?;
        self.observe_unchecked(observed);
        Ok(())
    }

    pub(crate) fn observe_unchecked(&mut self, observed: Symbol) {
        let n = self.class.alphabet.size();
        for (i, lm) in self.log_marginals.iter_mut().enumerate() {
            let p = self.model_conditionals[i * n + observed];
            *lm = if p > 0.0 {
                *lm + p.ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        let joint: Vec<f64> = self
            .class
            .log_weights
            .iter()
            .zip(&self.log_marginals)
            .map(|(lw, lm)| lw + lm)
            .collect();
        self.log_xi = log_sum_exp(&joint);
        self.prefix.push(observed);
        self.refresh_conditionals();
    }

    /// The state after one more symbol; `self` is left untouched.
    pub fn advance(&self, observed: Symbol) -> Result<Self> {
        let mut next = self.clone();
        next.observe(observed)?;
        Ok(next)
    }
}

/// Bits needed to write the nonnegative integer `v`.
fn integer_bits(v: usize) -> f64 {
    (usize::BITS - v.leading_zeros()) as f64
}

const FAMILY_TAG_BITS: f64 = 2.0;
const REAL_PARAMETER_BITS: f64 = 32.0;

/// Description length in bits used as a computable Occam weight.
///
/// Family tag, 32 bits per real parameter, and the binary length of each
/// integer parameter (pattern symbols cost `⌈log₂ N⌉` each).
pub fn description_length(model: &ModelFamily) -> f64 {
    let n = model.alphabet().size();
    let body = match model {
        ModelFamily::Iid(m) => REAL_PARAMETER_BITS * m.probabilities().len() as f64,
        ModelFamily::Markov(m) => {
            let reals = m.transitions().len() * n + m.initial().len();
            integer_bits(m.order()) + REAL_PARAMETER_BITS * reals as f64
        }
        ModelFamily::Periodic(m) => {
            let symbol_bits = integer_bits(n - 1);
            integer_bits(m.pattern().len()) + symbol_bits * m.pattern().len() as f64
        }
    };
    FAMILY_TAG_BITS + body
}

/// `w_i ∝ 2^{-DL_i}`, normalized.
///
/// Computed relative to the shortest description so long descriptions do not
/// all underflow; a weight that would still underflow is floored at
/// `f64::MIN_POSITIVE` to keep every prior weight strictly positive.
pub fn weights_from_description_lengths(bits: &[f64]) -> Vec<f64> {
    let shortest = bits.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = bits
        .iter()
        .map(|b| (-(b - shortest)).exp2().max(f64::MIN_POSITIVE))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut()
        .for_each(|x| *x = (*x / total).max(f64::MIN_POSITIVE));
    w
}

pub fn weight_by_description_length(models: &[ModelFamily]) -> Vec<f64> {
    let bits: Vec<f64> = models.iter().map(description_length).collect();
    weights_from_description_lengths(&bits)
}
