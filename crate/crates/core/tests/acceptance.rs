//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{grid, random_loss, random_model, rng, GridPoint, GRID_HORIZON};
use rand::Rng;
use unipred::engine::expectations;
use unipred::harness::config::Mode;
use unipred::harness::{run, verify_inequality_suite, ExperimentConfig};
use unipred::{
    accumulate, betting_profile, error_excess_bound, expected_errors, expected_losses, loss_bound,
    predict_from, step_error, step_kl, Alphabet, Evaluation, LossMatrix, ModelClass, ModelFamily,
    Payouts, Scheme, StepMask, DEFAULT_BUDGET,
};

const EXACT: Evaluation = Evaluation::Exact {
    budget: DEFAULT_BUDGET,
};
const SIGMAS: f64 = 3.0;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn label(p: &GridPoint) -> String {
    format!(
        "N={} |M|={} seed={} truth={}",
        p.alphabet,
        p.class.len(),
        p.seed,
        p.truth
    )
}

fn entropy_inequality() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let r = verify_inequality_suite(100_000, 8, 20_260_101);
    let elapsed = start.elapsed().as_secs_f64();
    o.require(r.per_alphabet.len() == 7, || {
        "alphabets 2..=8 not all covered".into()
    });
    o.require(r.violations() == 0, || {
        format!("{} violations", r.violations())
    });
    o.require(r.worst_slack() >= -1e-12, || {
        format!("worst slack {}", r.worst_slack())
    });
    for s in &r.per_alphabet {
        o.require(s.samples == 100_000, || {
            format!("N={} ran {} samples", s.alphabet, s.samples)
        });
        o.require(s.degenerate_max_abs_slack == 0.0, || {
            format!("N={} y=z slack {}", s.alphabet, s.degenerate_max_abs_slack)
        });
        o.require(s.shared_zero_finite, || {
            format!("N={} infinite rhs with shared zeros", s.alphabet)
        });
    }
    o.require(elapsed < 10.0, || format!("took {elapsed:.2}s"));
    o.detail = format!(
        "{} pairs, {} violations, worst slack {:.3e}, {:.2}s",
        r.samples(),
        r.violations(),
        r.worst_slack(),
        elapsed
    );
    o
}

fn entropy_bound_and_convergence(points: &[GridPoint]) -> (Outcome, Outcome) {
    let mut bound = Outcome::new();
    let mut conv = Outcome::new();
    for p in points {
        let info = accumulate(&p.class, p.truth, GRID_HORIZON, EXACT).unwrap();
        for n in 1..=GRID_HORIZON {
            let h = info.entropy(n);
            bound.require(h <= info.d_mu + 1e-9, || {
                format!("{}: H_{n}={h} > d_mu={}", label(p), info.d_mu)
            });
            bound.require(h >= info.entropy(n - 1), || {
                format!("{}: H decreases at n={n}", label(p))
            });
            let d = info.sq_distance(n);
            conv.require(d <= h + 1e-9, || {
                format!("{}: D_{n}={d} > H_{n}={h}", label(p))
            });
        }
    }
    let class = ModelClass::uniform(vec![
        ModelFamily::periodic(Alphabet::new(2).unwrap(), vec![1]).unwrap(),
        ModelFamily::iid(vec![0.5, 0.5]).unwrap(),
    ])
    .unwrap();
    let info = accumulate(&class, 0, 60, EXACT).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=60 {
        let expect = (2.0 / (1.0 + 0.5f64.powi(n as i32))).ln();
        worst = worst.max((info.entropy(n) - expect).abs());
    }
    bound.require(worst <= 1e-9, || format!("running example off by {worst}"));
    bound.detail = format!(
        "{} grid configs, running example max deviation {worst:.1e}",
        points.len()
    );
    conv.detail = format!("{} grid configs, every n <= {GRID_HORIZON}", points.len());
    (bound, conv)
}

fn optimality_and_error_bounds(points: &[GridPoint]) -> (Outcome, Outcome) {
    let mut opt = Outcome::new();
    let mut thm = Outcome::new();
    let mut comparisons = 0usize;
    for p in points {
        let mut r = rng(p.seed ^ ((p.truth as u64) << 32));
        let strategies: Vec<ModelFamily> =
            (0..20).map(|_| random_model(&mut r, p.alphabet)).collect();
        let mut schemes = vec![Scheme::Informed, Scheme::Universal];
        schemes.extend(strategies.iter().map(|s| Scheme::Custom(s)));
        let errors = expected_errors(&p.class, p.truth, &schemes, GRID_HORIZON, EXACT).unwrap();
        let info = accumulate(&p.class, p.truth, GRID_HORIZON, EXACT).unwrap();
        for n in 1..=GRID_HORIZON {
            let e_mu = errors[0].at(n);
            for (s, ledger) in errors.iter().enumerate().skip(1) {
                comparisons += 1;
                opt.require(e_mu <= ledger.at(n) + 1e-10, || {
                    format!(
                        "{}: scheme {s} E_{n}={} < E_mu={e_mu}",
                        label(p),
                        ledger.at(n)
                    )
                });
            }
            let excess = errors[1].at(n) - e_mu;
            let b = error_excess_bound(e_mu, info.entropy(n));
            thm.require(excess >= -1e-9, || {
                format!("{}: negative excess {excess}", label(p))
            });
            thm.require(excess <= b.tight + 1e-9, || {
                format!("{}: excess {excess} > bound {} at n={n}", label(p), b.tight)
            });
            thm.require(b.tight <= b.loose + 1e-9, || {
                format!("{}: tight > loose at n={n}", label(p))
            });
        }
    }
    opt.detail = format!("{} grid configs, {comparisons} comparisons", points.len());
    thm.detail = format!("{} grid configs exact", points.len());
    (opt, thm)
}

/// Monte-Carlo half of the error-bound criterion.
fn error_bounds_monte_carlo(thm: &mut Outcome) {
    let n = 200;
    let trials = 2000;
    let start = Instant::now();
    let mut runs = 0;
    for (i, &(alphabet, size)) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)]
        .iter()
        .enumerate()
    {
        let seed = 77_000 + i as u64;
        let class = common::random_class(&mut rng(seed), alphabet, size);
        for truth in 0..size {
            runs += 1;
            let eval = Evaluation::MonteCarlo { trials, seed };
            let ledgers = expectations(&class, truth, n, eval, 4, |node, out| {
                let e_mu = step_error(node.mu, predict_from(node.mu));
                let e_xi = step_error(node.mu, predict_from(node.xi));
                out[0] = e_mu;
                out[1] = e_xi;
                out[2] = e_xi - e_mu;
                out[3] = step_kl(node.mu, node.xi);
            })
            .unwrap();
            let (mu, excess, h) = (&ledgers[0], &ledgers[2], &ledgers[3]);
            for k in 1..=n {
                let se = excess.std_error_at(k);
                let value = excess.at(k);
                let upper = error_excess_bound(
                    mu.at(k) + SIGMAS * mu.std_error_at(k),
                    h.at(k) + SIGMAS * h.std_error_at(k),
                );
                let at_estimate = error_excess_bound(mu.at(k), h.at(k));
                let what = format!("MC seed={seed} truth={truth} n={k}");
                thm.require(value >= -SIGMAS * se - 1e-9, || {
                    format!("{what}: excess {value} se {se}")
                });
                thm.require(value <= upper.tight + SIGMAS * se + 1e-9, || {
                    format!("{what}: excess {value} > {} (se {se})", upper.tight)
                });
                thm.require(at_estimate.tight <= at_estimate.loose + 1e-9, || {
                    format!("{what}: tight > loose")
                });
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    thm.require(elapsed < 60.0, || {
        format!("Monte-Carlo part took {elapsed:.1}s")
    });
    thm.detail += &format!(", {runs} Monte-Carlo runs (n={n}, {trials} trials) in {elapsed:.1}s");
}

fn deterministic_environments() -> Outcome {
    let mut o = Outcome::new();
    let n = 1000;
    let mut runs = 0;
    for size in 2..=8usize {
        for s in 0..4u64 {
            let seed = 5_000 + 10 * size as u64 + s;
            let mut r = rng(seed);
            let alphabet = 2 + (s as usize % 2);
            let a = Alphabet::new(alphabet).unwrap();
            let len = r.random_range(1..=6);
            let pattern: Vec<usize> = (0..len).map(|_| r.random_range(0..alphabet)).collect();
            let mut models = vec![ModelFamily::periodic(a, pattern.clone()).unwrap()];
            while models.len() < size {
                let m = if r.random_bool(0.5) {
                    let mut p = pattern.clone();
                    let j = r.random_range(0..p.len());
                    p[j] = (p[j] + 1) % alphabet;
                    p.extend((0..r.random_range(0..3)).map(|_| r.random_range(0..alphabet)));
                    ModelFamily::periodic(a, p).unwrap()
                } else {
                    random_model(&mut r, alphabet)
                };
                models.push(m);
            }
            let truth = r.random_range(0..size);
            models.swap(0, truth);
            let class = ModelClass::uniform(models).unwrap();
            let e = expected_errors(&class, truth, &[Scheme::Universal], n, EXACT).unwrap();
            let limit = 2.0 * (size as f64).ln();
            runs += 1;
            for k in 1..=n {
                o.require(e[0].at(k) <= limit + 1e-9, || {
                    format!("|M|={size} seed={seed}: E_{k}={} > {limit}", e[0].at(k))
                });
            }
        }
    }
    o.detail = format!("{runs} deterministic-truth classes, |M| 2..=8, n <= {n}");
    o
}

fn loss_bounds(points: &[GridPoint]) -> Outcome {
    let mut o = Outcome::new();
    let mut worst_match: f64 = 0.0;
    for p in points {
        let mut r = rng(p.seed.wrapping_mul(31) + p.truth as u64);
        let mut losses: Vec<LossMatrix> =
            (0..10).map(|_| random_loss(&mut r, p.alphabet)).collect();
        let error_loss = LossMatrix::error_loss(Alphabet::new(p.alphabet).unwrap());
        losses.push(error_loss.clone());
        let ledgers = expected_losses(
            &p.class,
            p.truth,
            &[Scheme::Informed, Scheme::Universal],
            &losses,
            &StepMask::All,
            GRID_HORIZON,
            EXACT,
        )
        .unwrap();
        let info = accumulate(&p.class, p.truth, GRID_HORIZON, EXACT).unwrap();
        for (loss, pair) in losses.iter().zip(&ledgers) {
            for n in 1..=GRID_HORIZON {
                let (l_mu, l_xi) = (pair[0].at(n), pair[1].at(n));
                let h = info.entropy(n);
                let bound = loss_bound(l_mu, n, h, loss).unwrap();
                let excess = l_xi - l_mu;
                o.require(excess >= -1e-9, || {
                    format!("{}: loss excess {excess} < 0", label(p))
                });
                o.require(excess <= bound + 1e-9, || {
                    format!(
                        "{}: loss excess {excess} > bound {bound} at n={n}",
                        label(p)
                    )
                });
            }
        }
        let errors = &ledgers[10];
        for n in 1..=GRID_HORIZON {
            let h = info.entropy(n);
            let via_loss = loss_bound(errors[0].at(n), n, h, &error_loss).unwrap();
            let direct = error_excess_bound(errors[0].at(n), h).tight;
            worst_match = worst_match.max((via_loss - direct).abs());
        }
    }
    o.require(worst_match <= 1e-12, || {
        format!("error-loss bound differs by {worst_match}")
    });
    o.detail = format!(
        "{} grid configs x 10 loss tables, error-loss bound max deviation {worst_match:.1e}",
        points.len()
    );
    o
}

fn games_of_chance() -> Outcome {
    let mut o = Outcome::new();
    let class = ModelClass::uniform(vec![
        ModelFamily::iid(vec![0.4, 0.6]).unwrap(),
        ModelFamily::iid(vec![0.6, 0.4]).unwrap(),
    ])
    .unwrap();
    let payouts = Payouts::even_money(Alphabet::new(2).unwrap(), &[1, 0]).unwrap();
    let n = 300;
    let eval = Evaluation::MonteCarlo {
        trials: 2000,
        seed: 20_260_501,
    };
    let report = betting_profile(&class, 1, &payouts, n, eval).unwrap();
    let p_mu = report.final_avg_profit_mu();
    let se = report.avg_profit_mu_se[n - 1];
    o.require((p_mu - 0.2).abs() <= SIGMAS * se + 1e-9, || {
        format!("p_mu={p_mu} se={se}")
    });
    match (report.crossing_n, report.crossing_bound) {
        (Some(c), Some(b)) => o.require(c as f64 <= b, || format!("crossing {c} > bound {b}")),
        other => o.failures.push(format!("no crossing or bound: {other:?}")),
    }
    o.detail = format!(
        "p_mu={p_mu:.6} (se {se:.1e}), crossing at n={:?}, bound {:.2}, 2000 seeded trials",
        report.crossing_n,
        report.crossing_bound.unwrap_or(f64::NAN)
    );
    o
}

fn oracle_equivalence(points: &[GridPoint]) -> Outcome {
    let mut o = Outcome::new();
    let mut comparisons = 0;
    let mut worst_z: f64 = 0.0;
    let mut random = 0;
    for (i, p) in points.iter().enumerate() {
        let loss = random_loss(&mut rng(9_000 + i as u64), p.alphabet);
        let schemes = [Scheme::Informed, Scheme::Universal];
        let mc = Evaluation::MonteCarlo {
            trials: 2000,
            seed: 31_337 + i as u64,
        };
        let losses = std::slice::from_ref(&loss);
        let exact_e = expected_errors(&p.class, p.truth, &schemes, GRID_HORIZON, EXACT).unwrap();
        let mc_e = expected_errors(&p.class, p.truth, &schemes, GRID_HORIZON, mc).unwrap();
        let exact_l = expected_losses(
            &p.class,
            p.truth,
            &schemes,
            losses,
            &StepMask::All,
            GRID_HORIZON,
            EXACT,
        )
        .unwrap()
        .remove(0);
        let mc_l = expected_losses(
            &p.class,
            p.truth,
            &schemes,
            losses,
            &StepMask::All,
            GRID_HORIZON,
            mc,
        )
        .unwrap()
        .remove(0);
        for (name, exact, est) in [("E", &exact_e, &mc_e), ("L", &exact_l, &mc_l)] {
            for s in 0..2 {
                comparisons += 1;
                let diff = (est[s].total() - exact[s].total()).abs();
                let se = est[s].total_std_error();
                if se > 0.0 {
                    random += 1;
                    worst_z = worst_z.max(diff / se);
                }
                o.require(diff <= SIGMAS * se + 1e-9, || {
                    format!(
                        "{}: {name}[{s}] mc {} exact {} se {se}",
                        label(p),
                        est[s].total(),
                        exact[s].total()
                    )
                });
            }
        }
    }
    let text = r#"
schema = "unipred-experiment/1"
alphabet = 3
truth = 1
horizon = 12
weights = "description_length"
mode = "monte_carlo"
trials = 500
seed = 4

[[models]]
family = "periodic"
pattern = [0, 2]

[[models]]
family = "markov"
order = 1
transitions = [[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4]]

[loss]
table = [[0.0, 1.0, 0.4], [1.0, 0.0, 0.4], [1.0, 1.0, 0.0]]
"#;
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    let mc_bytes = (run(&cfg).unwrap().to_csv(), run(&cfg).unwrap().to_csv());
    o.require(mc_bytes.0 == mc_bytes.1, || {
        "Monte-Carlo reports differ".into()
    });
    let mut exact = cfg.clone();
    exact.mode = Mode::Exact;
    let exact_bytes = (run(&exact).unwrap().to_csv(), run(&exact).unwrap().to_csv());
    o.require(exact_bytes.0 == exact_bytes.1, || {
        "exact reports differ".into()
    });
    o.detail = format!(
        "{} grid configs, {comparisons} comparisons ({random} with nonzero standard error), worst |z| {worst_z:.2}, repeat runs byte-identical: {}",
        points.len(),
        mc_bytes.0 == mc_bytes.1 && exact_bytes.0 == exact_bytes.1
    );
    o
}

fn main() -> ExitCode {
    let points = grid();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "entropy inequality", entropy_inequality()));
    let (bound, conv) = entropy_bound_and_convergence(&points);
    results.push((2, "entropy upper bound", bound));
    results.push((3, "squared distance below entropy", conv));
    let (opt, mut thm) = optimality_and_error_bounds(&points);
    error_bounds_monte_carlo(&mut thm);
    results.push((4, "informed predictor optimality", opt));
    results.push((5, "error excess bounds", thm));
    results.push((
        6,
        "deterministic environments",
        deterministic_environments(),
    ));
    results.push((7, "loss bound", loss_bounds(&points)));
    results.push((8, "games of chance", games_of_chance()));
    results.push((
        9,
        "Monte-Carlo and exact agreement",
        oracle_equivalence(&points),
    ));

    let mut all = true;
    for (id, name, o) in &results {
        let verdict = if o.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{verdict} criterion {id}: {name}: {}", o.detail);
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
        if o.failures.len() > 10 {
            println!("    ... {} more", o.failures.len() - 10);
        }
        all &= o.failures.is_empty();
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
