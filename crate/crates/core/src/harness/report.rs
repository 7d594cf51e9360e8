//! Bound reports and their CSV form.
//!
//! Columns are fixed: `k,scheme,quantity,value,bound,slack,verdict`. Numbers
//! are written with 17 significant digits in scientific notation, `inf` /
//! `-inf` / `nan` for non-finite values, and negative zero as zero. Summary
//! rows use `k = all` and `scheme = summary`.

use std::fmt;
use std::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NotApplicable => "NOT-APPLICABLE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub k: usize,
    pub scheme: String,
    pub quantity: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub verdict: Option<Verdict>,
}

/// Aggregate verdict of one named check over every step it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: String,
    pub verdict: Verdict,
    /// Smallest `bound − value` seen; `None` when never evaluated.
    pub worst_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundReport {
    pub rows: Vec<Row>,
    pub summary: Vec<CheckSummary>,
}

/// Renders a number the way report files store it.
pub fn render_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.16e}", v + 0.0)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(render_number).unwrap_or_default()
}

impl BoundReport {
    pub fn row(&mut self, k: usize, scheme: &str, quantity: &str, value: f64) {
        self.rows.push(Row {
            k,
            scheme: scheme.into(),
            quantity: quantity.into(),
            value,
            bound: None,
            slack: None,
            verdict: None,
        });
    }

    /// Records `value ≤ bound` at step `k`, passing if
    /// `value ≤ bound + allowance`.
    pub fn check(
        &mut self,
        k: usize,
        scheme: &str,
        quantity: &str,
        value: f64,
        bound: f64,
        allowance: f64,
    ) -> Verdict {
        let slack = bound - value;
        let verdict = if value <= bound + allowance || (value.is_infinite() && value == bound) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.rows.push(Row {
            k,
            scheme: scheme.into(),
            quantity: quantity.into(),
            value,
            bound: Some(bound),
            slack: Some(slack),
            verdict: Some(verdict),
        });
        self.fold_summary(quantity, verdict, Some(slack));
        verdict
    }

    pub fn not_applicable(&mut self, k: usize, scheme: &str, quantity: &str, value: f64) {
        self.rows.push(Row {
            k,
            scheme: scheme.into(),
            quantity: quantity.into(),
            value,
            bound: None,
            slack: None,
            verdict: Some(Verdict::NotApplicable),
        });
        self.fold_summary(quantity, Verdict::NotApplicable, None);
    }

    fn fold_summary(&mut self, name: &str, verdict: Verdict, slack: Option<f64>) {
        let entry = match self.summary.iter_mut().find(|c| c.name == name) {
            Some(e) => e,
            None => {
                self.summary.push(CheckSummary {
                    name: name.into(),
                    verdict,
                    worst_slack: slack,
                });
                return;
            }
        };
        entry.verdict = match (entry.verdict, verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::NotApplicable,
        };
        entry.worst_slack = match (entry.worst_slack, slack) {
            (Some(a), Some(b)) => Some(if b < a { b } else { a }),
            (a, b) => a.or(b),
        };
    }

    /// No check failed. Not-applicable checks do not count against a run.
    pub fn passed(&self) -> bool {
        self.summary.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.summary
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.verdict)
    }

    pub fn rows_for<'a>(
        &'a self,
        scheme: &'a str,
        quantity: &'a str,
    ) -> impl Iterator<Item = &'a Row> {
        self.rows
            .iter()
            .filter(move |r| r.scheme == scheme && r.quantity == quantity)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "k", "scheme", "quantity", "value", "bound", "slack", "verdict",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.scheme.clone(),
                r.quantity.clone(),
                render_number(r.value),
                opt(r.bound),
                opt(r.slack),
                r.verdict.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        for c in &self.summary {
            let slack = opt(c.worst_slack);
            w.write_record([
                "all",
                "summary",
                &c.name,
                &slack,
                "",
                &slack,
                c.verdict.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}
