use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use unipred::harness::{
    enumerate, load_config, render_number, run, verify_inequality_suite, ExperimentConfig,
    HarnessError, InequalityReport, Verdict,
};

#[derive(Parser)]
#[command(
    name = "unipred",
    version,
    about = "Bayes-mixture prediction bound verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML); alternative to the positional argument.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte-Carlo trials, or samples per alphabet size for `verify-inequality`.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Suppress the verdict summary.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound a config admits and write the report as CSV.
    Run {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Randomized check of the squared-distance / relative-entropy inequality.
    VerifyInequality {
        /// Largest alphabet size tested; sizes start at 2.
        #[arg(long, default_value_t = 8)]
        max_alphabet: usize,
    },
    /// Dump the exact per-prefix table of a config as CSV.
    Enumerate {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
}

const INEQUALITY_SEED: u64 = 20_010_226;
const INEQUALITY_SAMPLES: u64 = 100_000;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { path } => {
            let cfg = experiment_config(cli, path.as_deref())?;
            let report = run(&cfg).map_err(describe)?;
            report
                .write_csv(output(cli.out.as_deref())?)
                .context("writing report")?;
            if !cli.quiet {
                for check in &report.summary {
                    let slack = check.worst_slack.map(render_number).unwrap_or_default();
                    eprintln!(
                        "{:<15} {:<24} worst slack {slack}",
                        check.verdict, check.name
                    );
                }
            }
            Ok(report.passed())
        }
        Command::VerifyInequality { max_alphabet } => {
            if *max_alphabet < 2 {
                bail!("--max-alphabet must be at least 2");
            }
            let samples = cli.trials.unwrap_or(INEQUALITY_SAMPLES);
            if samples == 0 {
                bail!("--trials must be at least 1");
            }
            let seed = cli.seed.unwrap_or(INEQUALITY_SEED);
            let report = verify_inequality_suite(samples, *max_alphabet, seed);
            write_inequality(&report, output(cli.out.as_deref())?)?;
            if !cli.quiet {
                let verdict = if report.passed() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                eprintln!(
                    "{verdict} {} samples, {} violations, worst slack {}",
                    report.samples(),
                    report.violations(),
                    render_number(report.worst_slack())
                );
            }
            Ok(report.passed())
        }
        Command::Enumerate { path } => {
            let cfg = experiment_config(cli, path.as_deref())?;
            let exp = cfg.validate().map_err(|e| describe(e.into()))?;
            let visited = enumerate(&exp, output(cli.out.as_deref())?).map_err(describe)?;
            if !cli.quiet {
                eprintln!("{visited} prefixes");
            }
            Ok(true)
        }
    }
}

fn experiment_config(cli: &Cli, positional: Option<&Path>) -> Result<ExperimentConfig> {
    let path = match (positional, cli.config.as_deref()) {
        (Some(a), Some(b)) if a != b => {
            bail!("config given twice: {} and {}", a.display(), b.display())
        }
        (Some(p), _) | (None, Some(p)) => p,
        (None, None) => bail!("no config given; pass a path or --config <path>"),
    };
    let mut cfg = load_config(path)
        .map_err(describe)
        .with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    Ok(cfg)
}

/// Spells out every offending field of a config error.
fn describe(e: HarnessError) -> anyhow::Error {
    match e {
        HarnessError::Config(c) => {
            let lines: Vec<String> = c
                .issues
                .iter()
                .map(|i| format!("  {}: {}", i.field, i.message))
                .collect();
            anyhow::anyhow!("invalid configuration\n{}", lines.join("\n"))
        }
        other => other.into(),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_inequality(report: &InequalityReport, mut out: impl Write) -> Result<()> {
    writeln!(
        out,
        "alphabet,samples,violations,worst_slack,degenerate_samples,degenerate_max_abs_slack,shared_zero_samples,shared_zero_finite"
    )?;
    for s in &report.per_alphabet {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.alphabet,
            s.samples,
            s.violations,
            render_number(s.worst_slack),
            s.degenerate_samples,
            render_number(s.degenerate_max_abs_slack),
            s.shared_zero_samples,
            s.shared_zero_finite
        )?;
    }
    out.flush()?;
    Ok(())
}
