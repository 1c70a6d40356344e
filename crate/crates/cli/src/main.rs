//! `l0recov`: command-line front end for the sparse-recovery experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use l0recov_cli::commands;
use l0recov_cli::config::SolverKind;
use l0recov_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "l0recov",
    about = "Sparse signal recovery benchmarks: IIHT and baselines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Args, Debug)]
struct CommonFlags {
    /// Config file of key = value lines with per-solver sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seed list, e.g. 0,1,2.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Penalty weight mu.
    #[arg(long)]
    mu: Option<f64>,
    /// Sampling ratio M/N.
    #[arg(long)]
    sr: Option<f64>,
    /// Sparsity level K/N.
    #[arg(long)]
    sl: Option<f64>,
    /// Noise level sigma (fraction of mean |y|).
    #[arg(long)]
    sigma: Option<f64>,
    /// Relative-change stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget.
    #[arg(long, value_name = "N")]
    max_iters: Option<usize>,
    /// Comma-separated solver list (measurement, ist, cosamp, iht, iiht).
    #[arg(long)]
    solvers: Option<String>,
    /// Worker pool size for independent trials.
    #[arg(long, value_name = "N")]
    parallel: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the vector benchmark and write bench.csv.
    Bench(CommonFlags),
    /// Run the sparse-image phantom study and write PGM images plus a CSV.
    Phantom(CommonFlags),
    /// Check the convergence guarantees on a grid of random instances.
    Verify(CommonFlags),
    /// Apply one solver to A and y files.
    Solve {
        #[command(flatten)]
        common: CommonFlags,
        /// Measurement matrix file (binary or .csv).
        #[arg(long = "a", value_name = "PATH")]
        a_path: PathBuf,
        /// Measurement vector file (binary or .csv).
        #[arg(long = "y", value_name = "PATH")]
        y_path: PathBuf,
        /// Solver to apply (measurement, iiht, iht, cosamp).
        #[arg(long, default_value = "iiht")]
        solver: String,
    },
    /// Generate a synthetic problem and persist its components.
    Gen(CommonFlags),
}

fn apply_flags(cfg: &mut RunConfig, flags: &CommonFlags) -> Result<(), CliError> {
    if let Some(path) = &flags.config {
        cfg.apply_file(path)?;
    }
    if let Some(seeds) = &flags.seed {
        cfg.seeds = seeds
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad seed '{s}'")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(out) = &flags.out {
        cfg.out_dir = out.clone();
    }
    if let Some(sr) = flags.sr {
        cfg.sampling_ratio = sr;
    }
    if let Some(sl) = flags.sl {
        cfg.sparsity_level = sl;
    }
    if let Some(tol) = flags.tol {
        cfg.tol = tol;
    }
    if let Some(mi) = flags.max_iters {
        cfg.max_iters = mi;
    }
    if let Some(p) = flags.parallel {
        cfg.parallel = p;
    }
    if let Some(list) = &flags.solvers {
        cfg.solvers = list
            .split(',')
            .map(SolverKind::parse)
            .collect::<Result<_, _>>()?;
    }
    cfg.merge_cases(flags.sigma.map(|s| vec![s]), flags.mu.map(|m| vec![m]))?;
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Bench(flags) => {
            let mut cfg = RunConfig::default_bench();
            apply_flags(&mut cfg, &flags)?;
            commands::cmd_bench(&cfg)
        }
        Command::Phantom(flags) => {
            let mut cfg = RunConfig::default_phantom();
            apply_flags(&mut cfg, &flags)?;
            commands::cmd_phantom(&cfg)
        }
        Command::Verify(flags) => {
            let mut cfg = RunConfig::default_verify();
            apply_flags(&mut cfg, &flags)?;
            commands::cmd_verify(&cfg)
        }
        Command::Solve {
            common,
            a_path,
            y_path,
            solver,
        } => {
            let mut cfg = RunConfig::default_bench();
            apply_flags(&mut cfg, &common)?;
            let kind = SolverKind::parse(&solver)?;
            commands::cmd_solve_file(&cfg, &a_path, &y_path, kind)
        }
        Command::Gen(flags) => {
            let mut cfg = RunConfig::default_bench();
            apply_flags(&mut cfg, &flags)?;
            commands::cmd_gen(&cfg)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
