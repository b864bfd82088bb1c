mod commands;
mod config;
mod figures;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::ChecksFailed;
use config::RawConfig;

/// Random logistic map experiments: Monte Carlo ensembles, Ulam operators,
/// verification checks and figure data.
#[derive(Debug, Parser)]
#[command(name = "randlogistic", version)]
struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (required, here or in the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    lambda_min: Option<f64>,
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    #[arg(long, global = true)]
    particles: Option<usize>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an ensemble and write histogram snapshots.
    Simulate {
        /// Starting law: discrete5, discrete3, exponential, gamma, normal, student_t, uniform.
        #[arg(long)]
        init: Option<String>,
        /// Comma-separated steps to record (default: the last step).
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<usize>,
        /// Rate of the truncated exponential starting law.
        #[arg(long)]
        exp_rate: Option<f64>,
    },
    /// Build the Ulam operator and its invariant vector.
    Ulam {
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Use the identity kernel instead of the logistic one.
        #[arg(long)]
        identity: bool,
    },
    /// Run a check suite: minorization, reachability, recurrence, two-map, convergence or all.
    Verify { suite: String },
    /// Write the data behind a figure (or `all`).
    Figure { id: String },
}

fn layered(cli: &Cli) -> anyhow::Result<config::ExperimentConfig> {
    let base = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let mut flags = RawConfig::default();
    let mut put = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.set(key, v);
        }
    };
    put("seed", cli.seed.map(|v| v.to_string()));
    put("lambda_min", cli.lambda_min.map(|v| v.to_string()));
    put("lambda_max", cli.lambda_max.map(|v| v.to_string()));
    put("particles", cli.particles.map(|v| v.to_string()));
    put("steps", cli.steps.map(|v| v.to_string()));
    put("bins", cli.bins.map(|v| v.to_string()));
    put("out", cli.out.as_ref().map(|p| p.display().to_string()));
    put("threads", cli.threads.map(|v| v.to_string()));
    match &cli.command {
        Command::Simulate {
            init,
            snapshots,
            exp_rate,
        } => {
            put("init", init.clone());
            if !snapshots.is_empty() {
                let list: Vec<String> = snapshots.iter().map(|s| s.to_string()).collect();
                put("snapshots", Some(list.join(",")));
            }
            put("exp_rate", exp_rate.map(|v| v.to_string()));
        }
        Command::Ulam {
            nodes,
            tol,
            max_iter,
            ..
        } => {
            put("nodes", nodes.map(|v| v.to_string()));
            put("tol", tol.map(|v| v.to_string()));
            put("max_iter", max_iter.map(|v| v.to_string()));
        }
        Command::Verify { .. } | Command::Figure { .. } => {}
    }
    Ok(base.merge(flags).resolve()?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = layered(&cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match &cli.command {
        Command::Simulate { .. } => commands::simulate(&cfg),
        Command::Ulam { identity, .. } => commands::ulam(&cfg, *identity),
        Command::Verify { suite } => commands::verify(&cfg, suite),
        Command::Figure { id } => figures::figure(&cfg, id),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<randlogistic::Error>() {
        Some(e) if e.is_config() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
