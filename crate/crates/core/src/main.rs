use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use ccs_ura::harness::{run_mimo, run_predict, run_siso, ExperimentConfig, Range, Scenario, Table};
use ccs_ura::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ura", about = "Unsourced random access experiments with coded compressed sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-antenna GMAC sweep with the NNLS inner decoder.
    Siso(RunArgs),
    /// Multi-antenna block fading with covariance activity detection.
    Mimo(RunArgs),
    /// Analytical predictors for erroneous paths and column pruning.
    Predict(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file. Optional for `predict`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; overrides `output` from the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Report zero for wall-clock columns so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

fn load(scenario: Scenario, args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        None if scenario == Scenario::Predict => {
            let mut cfg = ExperimentConfig::new(Scenario::Predict, Vec::new());
            cfg.users = Range::Span { start: 25, end: 150, step: 5 };
            cfg
        }
        None => return Err(Error::config("config", "a config file is required for simulations").into()),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(workers) = args.workers {
        cfg.workers = Some(workers);
    }
    if args.no_timing {
        cfg.timing = false;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (scenario, args) = match &cli.command {
        Command::Siso(a) => (Scenario::Siso, a),
        Command::Mimo(a) => (Scenario::Mimo, a),
        Command::Predict(a) => (Scenario::Predict, a),
    };
    let cfg = load(scenario, args)?;
    let table: Table = match scenario {
        Scenario::Siso => run_siso(&cfg)?.0,
        Scenario::Mimo => run_mimo(&cfg)?.0,
        Scenario::Predict => run_predict(&cfg)?,
    };
    let csv = table.to_csv();
    match &cfg.output {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Config { .. }) => 2,
                Some(Error::ResourceRefusal { .. }) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
