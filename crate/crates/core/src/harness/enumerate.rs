use std::io;

use super::config::Experiment;
use super::report::render_number;
use super::HarnessError;
use crate::engine::{walk_exact, Evaluation, DEFAULT_BUDGET};
use crate::information::{step_kl, step_sq};
use crate::prediction::predict_from;

/// Writes one CSV row per prefix the truth can emit, in depth-first order.
///
/// Columns: `k`, the prefix as dot-separated symbols, `μ(prefix)`, the next
/// symbol distributions of `μ` and `ξ`, the step divergence and squared
/// distance, and both argmax predictions. Returns the number of prefixes.
/// An exact-mode budget bounds the walk; Monte-Carlo configs use
/// [`DEFAULT_BUDGET`].
pub fn enumerate<W: io::Write>(exp: &Experiment, out: W) -> Result<u64, HarnessError> {
    let budget = match exp.evaluation {
        Evaluation::Exact { budget } => budget,
        Evaluation::MonteCarlo { .. } => DEFAULT_BUDGET,
    };
    let size = exp.class.alphabet().size();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string(), "prefix".into(), "mu_prefix".into()];
    header.extend((0..size).map(|a| format!("mu_{a}")));
    header.extend((0..size).map(|a| format!("xi_{a}")));
    header.extend([
        "h".into(),
        "sq".into(),
        "theta_mu".into(),
        "theta_xi".into(),
    ]);
    w.write_record(&header)?;

    let mut failure = None;
    let visited = walk_exact(&exp.class, exp.truth, exp.horizon, budget, |node| {
        if failure.is_some() {
            return;
        }
        let prefix: Vec<String> = node.prefix.iter().map(|s| s.to_string()).collect();
        let mut record = vec![
            node.k.to_string(),
            prefix.join("."),
            render_number(node.weight),
        ];
        record.extend(node.mu.iter().map(|&p| render_number(p)));
        record.extend(node.xi.iter().map(|&p| render_number(p)));
        record.push(render_number(step_kl(node.mu, node.xi)));
        record.push(render_number(step_sq(node.mu, node.xi)));
        record.push(predict_from(node.mu).to_string());
        record.push(predict_from(node.xi).to_string());
        if let Err(e) = w.write_record(&record) {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    w.flush()?;
    Ok(visited)
}
