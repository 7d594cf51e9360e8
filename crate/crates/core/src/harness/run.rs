use crate::decision::{betting_profile, expected_losses, loss_bound_with_range};
use crate::engine::{Evaluation, Ledger};
use crate::information::accumulate;
use crate::prediction::{error_excess_bound, expected_errors, Scheme};
use crate::tolerance::TOL;

use super::config::{Experiment, ExperimentConfig};
use super::report::BoundReport;
use super::HarnessError;

pub fn run(config: &ExperimentConfig) -> Result<BoundReport, HarnessError> {
    let experiment = config.validate()?;
    run_experiment(&experiment)
}

/// Standard-error allowance multiplier: zero for exact runs.
fn sigmas(evaluation: Evaluation) -> f64 {
    match evaluation {
        Evaluation::Exact { .. } => 0.0,
        Evaluation::MonteCarlo { .. } => TOL.monte_carlo_sigmas,
    }
}

fn quad(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn scheme_names(prefix: &str, customs: usize) -> Vec<String> {
    let mut names = vec![format!("{prefix}_mu"), format!("{prefix}_xi")];
    names.extend((0..customs).map(|i| format!("{prefix}_rho{i}")));
    names
}

/// Evaluates every configured quantity and bound check.
///
/// In Monte-Carlo mode each check allows `3σ` of estimator noise: the value
/// may exceed the bound by three standard errors, and bounds that depend on
/// estimated inputs are also evaluated at those inputs plus three standard
/// errors.
pub fn run_experiment(exp: &Experiment) -> Result<BoundReport, HarnessError> {
    let class = &exp.class;
    let truth = exp.truth;
    let n = exp.horizon;
    let sig = sigmas(exp.evaluation);
    let mut report = BoundReport::default();

    let info = accumulate(class, truth, n, exp.evaluation)?;
    let h = &info.relative_entropy;
    let d = &info.squared_distance;
    for k in 1..=n {
        report.row(k, "xi", "h_k", h.per_step[k - 1]);
        report.check(
            k,
            "xi",
            "H_k",
            h.at(k),
            info.d_mu,
            TOL.bound + sig * h.std_error_at(k),
        );
        report.check(k, "xi", "H_monotone", h.at(k - 1), h.at(k), 0.0);
        report.row(k, "xi", "sq_k", d.per_step[k - 1]);
        report.check(
            k,
            "xi",
            "D_k",
            d.at(k),
            h.at(k),
            TOL.bound + sig * quad(d.std_error_at(k), h.std_error_at(k)),
        );
        report.check(k, "xi", "D_monotone", d.at(k - 1), d.at(k), 0.0);
    }

    let mut schemes = vec![Scheme::Informed, Scheme::Universal];
    schemes.extend(exp.strategies.iter().map(|s| Scheme::Custom(s)));

    let errors = expected_errors(class, truth, &schemes, n, exp.evaluation)?;
    let names = scheme_names("theta", exp.strategies.len());
    emit_ledgers(
        &mut report,
        &names,
        &errors,
        "e_k",
        "E_k",
        "E_optimality",
        sig,
    );
    let (mu, xi) = (&errors[0], &errors[1]);
    let deterministic = class.model(truth).is_deterministic();
    for k in 1..=n {
        let (e_mu, se_mu) = (mu.at(k), mu.std_error_at(k));
        let bound = error_excess_bound(e_mu, h.at(k));
        let upper = error_excess_bound(e_mu + sig * se_mu, h.at(k) + sig * h.std_error_at(k));
        let se_excess = quad(xi.std_error_at(k), se_mu);
        report.check(
            k,
            "theta_xi",
            "E_excess",
            xi.at(k) - e_mu,
            bound.tight,
            TOL.bound + sig * se_excess + (upper.tight - bound.tight),
        );
        report.check(
            k,
            "theta_xi",
            "E_excess_loose",
            bound.tight,
            bound.loose,
            TOL.bound,
        );
        if deterministic {
            report.check(
                k,
                "theta_xi",
                "E_deterministic",
                xi.at(k),
                2.0 * info.d_mu,
                TOL.bound + sig * xi.std_error_at(k),
            );
        }
    }

    if let Some((loss, mask)) = &exp.loss {
        let losses = expected_losses(
            class,
            truth,
            &schemes,
            std::slice::from_ref(loss),
            mask,
            n,
            exp.evaluation,
        )?
        .remove(0);
        let names = scheme_names("lambda", exp.strategies.len());
        emit_ledgers(
            &mut report,
            &names,
            &losses,
            "l_k",
            "L_k",
            "L_optimality",
            sig,
        );
        let (mu, xi) = (&losses[0], &losses[1]);
        for k in 1..=n {
            let (l_min, l_delta) = mask.effective_range(loss, k);
            let (l_mu, se_mu) = (mu.at(k), mu.std_error_at(k));
            let bound = loss_bound_with_range(l_mu, k, h.at(k), l_min, l_delta)?;
            let upper = loss_bound_with_range(
                l_mu + sig * se_mu,
                k,
                h.at(k) + sig * h.std_error_at(k),
                l_min,
                l_delta,
            )?;
            report.check(
                k,
                "lambda_xi",
                "L_excess",
                xi.at(k) - l_mu,
                bound,
                TOL.bound + sig * quad(xi.std_error_at(k), se_mu) + (upper - bound),
            );
        }
    }

    if let Some(payouts) = &exp.payouts {
        let betting = betting_profile(class, truth, payouts, n, exp.evaluation)?;
        for k in 1..=n {
            report.row(k, "lambda_mu", "avg_profit", betting.avg_profit_mu[k - 1]);
            report.row(k, "lambda_xi", "avg_profit", betting.avg_profit_xi[k - 1]);
        }
        match (betting.crossing_bound, betting.crossing_n) {
            (Some(bound), Some(c)) => {
                report.check(c, "lambda_xi", "betting_crossing", c as f64, bound, 0.0);
            }
            (Some(bound), None) if n as f64 >= bound => {
                report.check(
                    n,
                    "lambda_xi",
                    "betting_crossing",
                    f64::INFINITY,
                    bound,
                    0.0,
                );
            }
            (_, crossing) => {
                let value = crossing.map_or(f64::NAN, |c| c as f64);
                report.not_applicable(n, "lambda_xi", "betting_crossing", value);
            }
        }
    }

    Ok(report)
}

fn emit_ledgers(
    report: &mut BoundReport,
    names: &[String],
    ledgers: &[Ledger],
    step: &str,
    total: &str,
    optimality: &str,
    sig: f64,
) {
    let informed = &ledgers[0];
    for k in 1..=informed.horizon() {
        for (name, ledger) in names.iter().zip(ledgers) {
            report.row(k, name, step, ledger.per_step[k - 1]);
            report.row(k, name, total, ledger.at(k));
        }
        for (name, ledger) in names.iter().zip(ledgers).skip(1) {
            report.check(
                k,
                name,
                optimality,
                informed.at(k),
                ledger.at(k),
                TOL.optimality + sig * quad(informed.std_error_at(k), ledger.std_error_at(k)),
            );
        }
    }
}
