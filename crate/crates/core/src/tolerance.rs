//! Numeric tolerances shared by validation code and the property suites.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Normalization of a source's next-symbol distribution and of prior weights.
    pub normalization: f64,
    /// Slack for mixture-level identities (dominance, incremental vs direct).
    pub mixture: f64,
    /// Slack for the squared-distance vs relative-entropy inequality.
    pub entropy_inequality: f64,
    /// Slack for exact-enumeration bound checks.
    pub bound: f64,
    /// Slack for optimality comparisons between informed and other schemes.
    pub optimality: f64,
    /// Multiple of the standard error allowed for Monte-Carlo checks.
    pub monte_carlo_sigmas: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-12,
        mixture: 1e-10,
        entropy_inequality: 1e-12,
        bound: 1e-9,
        optimality: 1e-10,
        monte_carlo_sigmas: 3.0,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
