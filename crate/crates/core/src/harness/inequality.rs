use rand::Rng;

use crate::engine::trial_rng;
use crate::information::check_entropy_inequality;

/// Outcome of the randomized check for one alphabet size.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityStats {
    pub alphabet: usize,
    pub samples: u64,
    pub violations: u64,
    /// Smallest `rhs − lhs` over all samples.
    pub worst_slack: f64,
    pub degenerate_samples: u64,
    /// Largest `|rhs − lhs|` over samples with `y = z`.
    pub degenerate_max_abs_slack: f64,
    pub shared_zero_samples: u64,
    /// Every sample with zeros shared by `y` and `z` had a finite rhs.
    pub shared_zero_finite: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub per_alphabet: Vec<InequalityStats>,
}

impl InequalityReport {
    pub fn samples(&self) -> u64 {
        self.per_alphabet.iter().map(|s| s.samples).sum()
    }

    pub fn violations(&self) -> u64 {
        self.per_alphabet.iter().map(|s| s.violations).sum()
    }

    pub fn worst_slack(&self) -> f64 {
        self.per_alphabet
            .iter()
            .map(|s| s.worst_slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
            && self
                .per_alphabet
                .iter()
                .all(|s| s.degenerate_max_abs_slack == 0.0 && s.shared_zero_finite)
    }
}

fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Zeroes a random nonempty subset of coordinates, keeping at least one.
fn zero_some<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    let keep = rng.random_range(0..n);
    let mut zero: Vec<bool> = (0..n).map(|i| i != keep && rng.random_bool(0.5)).collect();
    if !zero.iter().any(|&z| z) {
        zero[(keep + 1) % n] = true;
    }
    zero
}

fn apply_zeros(v: &mut [f64], zero: &[bool]) {
    for (x, &z) in v.iter_mut().zip(zero) {
        if z {
            *x = 0.0;
        }
    }
    normalize(v);
}

/// Randomized check of `Σ (y − z)² ≤ Σ y ln(y/z)` for every alphabet size
/// `2..=max_alphabet`, `samples` pairs each.
///
/// Samples rotate through four shapes: `y = z`, two independent dense
/// distributions, zeros shared by `y` and `z`, and a sparse `y` against a
/// `z` with one coordinate shrunk towards zero. Alphabet size `N` draws from
/// stream `N` of `seed`.
pub fn verify_inequality_suite(samples: u64, max_alphabet: usize, seed: u64) -> InequalityReport {
    let per_alphabet = (2..=max_alphabet.max(2))
        .map(|n| {
            let mut rng = trial_rng(seed, n as u64);
            let mut stats = InequalityStats {
                alphabet: n,
                samples,
                violations: 0,
                worst_slack: f64::INFINITY,
                degenerate_samples: 0,
                degenerate_max_abs_slack: 0.0,
                shared_zero_samples: 0,
                shared_zero_finite: true,
            };
            for i in 0..samples {
                let mut y = dirichlet(&mut rng, n);
                let mut z = dirichlet(&mut rng, n);
                match i % 4 {
                    0 => z = y.clone(),
                    1 => {}
                    2 => {
                        let zero = zero_some(&mut rng, n);
                        apply_zeros(&mut y, &zero);
                        apply_zeros(&mut z, &zero);
                    }
                    _ => {
                        let zero = zero_some(&mut rng, n);
                        apply_zeros(&mut y, &zero);
                        let j = rng.random_range(0..n);
                        z[j] *= 10f64.powi(-rng.random_range(1..=15));
                        normalize(&mut z);
                    }
                }
                let check =
                    check_entropy_inequality(&y, &z).expect("sampled vectors are distributions");
                let slack = check.slack();
                if !check.holds {
                    stats.violations += 1;
                }
                stats.worst_slack = stats.worst_slack.min(slack);
                match i % 4 {
                    0 => {
                        stats.degenerate_samples += 1;
                        stats.degenerate_max_abs_slack =
                            stats.degenerate_max_abs_slack.max(slack.abs());
                    }
                    2 => {
                        stats.shared_zero_samples += 1;
                        stats.shared_zero_finite &= check.rhs.is_finite();
                    }
                    _ => {}
                }
            }
            stats
        })
        .collect();
    InequalityReport { per_alphabet }
}
