use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use peakon_core::harness::{
    cmd_approx, cmd_metric, cmd_simulate, cmd_verify, ApproxSettings, OutputRecord, Scenario, SeedSuite,
};
use peakon_core::par::Exec;

/// Conservative periodic Camassa–Holm multipeakons and the transport
/// distance J.
#[derive(Parser)]
#[command(name = "peakon", version)]
struct Cli {
    /// Scenario file (JSON, "schema": 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed plans for `metric`: identity, cdf, characteristic or all.
    #[arg(long, global = true)]
    seed_suite: Option<String>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the scenario's initial data and write the trajectory.
    Simulate,
    /// Bounds on J between the scenario's initial data and its partner.
    Metric,
    /// Multipeakon approximation error against N.
    Approx {
        /// Datum label (overrides the scenario's `approx.datum`).
        #[arg(long)]
        datum: Option<String>,
        /// Comma-separated list of N.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// Run a verification suite.
    Verify {
        /// kernel, conservation, collision, metric-axioms, lemma3, lemma5,
        /// lemma7, lemma1, residual, reversibility or all.
        #[arg(default_value = "all")]
        suite: String,
    },
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    let path = cli.config.as_ref().context("--config is required for this command")?;
    let mut sc = Scenario::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(name) = &cli.seed_suite {
        sc.metric.seeds = SeedSuite::parse(name)?;
    }
    if cli.sequential {
        sc.metric.optimizer.exec = Exec::Sequential;
    }
    Ok(sc)
}

fn run(cli: &Cli) -> Result<OutputRecord> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let rec = match &cli.command {
        Command::Simulate => cmd_simulate(&scenario(cli)?)?,
        Command::Metric => cmd_metric(&scenario(cli)?)?,
        Command::Approx { datum, n } => {
            let sc = cli.config.as_ref().map(|_| scenario(cli)).transpose()?;
            let base = sc.as_ref().and_then(|s| s.approx.clone());
            let settings = match (datum, base) {
                (Some(d), _) => ApproxSettings {
                    datum: d.clone(),
                    n_list: if n.is_empty() { vec![8, 16, 32, 64] } else { n.clone() },
                },
                (None, Some(mut a)) => {
                    if !n.is_empty() {
                        a.n_list = n.clone();
                    }
                    a
                }
                (None, None) => bail!("approx needs --datum or a scenario with an `approx` section"),
            };
            if settings.n_list.contains(&0) {
                bail!("every N must be at least 1");
            }
            cmd_approx(&settings, sc.as_ref())?
        }
        Command::Verify { suite } => cmd_verify(suite, exec)?,
    };
    Ok(rec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rec = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rec.write(&cli.out) {
        eprintln!("error: writing {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    for v in &rec.verdicts {
        println!(
            "{} {:<32} measured {:.6e}  limit {:.6e}  {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.measured,
            v.constant,
            v.inequality
        );
    }
    if rec.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
