//! Bayes-mixture sequence prediction over finite alphabets.
//!
//! The mixture `ξ = Σ w_i μ_i` over a finite model class predicts the next
//! symbol of a sequence drawn from an unknown member `μ`. This crate
//! computes `ξ`, the argmax predictor `Θ_ρ`, the loss-minimizing scheme
//! `Λ_ρ`, and exact or Monte-Carlo expectations of the quantities their
//! performance bounds are stated in: relative entropy `H_n`, squared distance
//! `D_n`, expected errors `E_n`, expected losses `L_n` and betting profits.
//! The [`harness`] module ties them together into configuration-driven,
//! reproducible bound reports.
//!
//! ```
//! use unipred::{accumulate, expected_errors, error_excess_bound, Alphabet, Evaluation,
//!               ModelClass, ModelFamily, Scheme, DEFAULT_BUDGET};
//!
//! # fn main() -> unipred::Result<()> {
//! let class = ModelClass::uniform(vec![
//!     ModelFamily::periodic(Alphabet::new(2)?, vec![1])?,
//!     ModelFamily::iid(vec![0.5, 0.5])?,
//! ])?;
//! let eval = Evaluation::Exact { budget: DEFAULT_BUDGET };
//! let info = accumulate(&class, 1, 10, eval)?;
//! let errors = expected_errors(&class, 1, &[Scheme::Informed, Scheme::Universal], 10, eval)?;
//! let bound = error_excess_bound(errors[0].total(), info.entropy(10));
//! assert!(errors[1].total() - errors[0].total() <= bound.tight + 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod decision;
pub mod engine;
pub mod error;
pub mod harness;
pub mod information;
pub mod mixture;
pub mod numeric;
pub mod prediction;
pub mod source;
pub mod tolerance;

pub use decision::{
    act, act_from, betting_profile, expected_loss_exact, expected_loss_mc, expected_losses,
    loss_bound, loss_bound_with_range, simulate_betting, BetRound, BettingReport, LossLedger,
    LossMatrix, Payouts, StepMask,
};
pub use engine::{Evaluation, Flavor, Ledger, Node, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use information::{
    accumulate, accumulate_exact, accumulate_mc, check_entropy_inequality, step_kl, step_sq,
    InequalityCheck, InfoLedger,
};
pub use mixture::{weight_by_description_length, MixtureState, ModelClass};
pub use prediction::{
    error_excess_bound, expected_errors, expected_errors_exact, expected_errors_mc, predict_from,
    step_error, ErrorBound, ErrorLedger, Predictor, Scheme,
};
pub use source::{
    conditional, joint, log_joint, sample, Alphabet, DeterministicPeriodic, IidCategorical,
    MarkovChain, ModelFamily, Sequence, Source, Symbol,
};
pub use tolerance::{Tolerances, TOL};
