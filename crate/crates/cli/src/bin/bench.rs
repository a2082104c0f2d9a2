//! Resampler benchmark over a grid of synthetic weight sets.
//!
//! `bench run` writes one CSV row per cell; `bench aggregate` reduces those
//! rows to a root-mean-square error per algorithm, N and y.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pfresample::bench::{aggregate_rmse, parse_n_list, parse_y_list, read_csv, run_grid, write_csv, write_rmse_csv, BenchConfig, BenchTarget};
use pfresample::Precision;

#[derive(Parser)]
#[command(about = "Benchmark the resamplers on synthetic Gaussian weight sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid and write one row per cell.
    Run {
        /// Comma-separated algorithms, or `all`. `sort` and `ess` time the
        /// context procedures.
        #[arg(long, default_value = "all")]
        algorithms: String,
        /// Particle counts: integers, `2^k`, or ranges `2^a..2^b`.
        #[arg(long, default_value = "2^4..2^20")]
        n: String,
        /// Observations: a comma list or `start:stop:step`.
        #[arg(long, default_value = "0:4:0.5")]
        y: String,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long, default_value = "f32")]
        precision: Precision,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Metropolis bias tolerance as a fraction of p*.
        #[arg(long, default_value_t = 1e-2)]
        epsilon_factor: f64,
        /// Capped rejection bound as a fraction of the weight supremum.
        #[arg(long, default_value_t = 0.5)]
        cap_fraction: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Reduce a run's rows to RMSE per (algorithm, N, y).
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_targets(s: &str) -> Result<Vec<BenchTarget>> {
    if s == "all" {
        return Ok(BenchConfig::default().targets);
    }
    let mut targets = s
        .split(',')
        .map(|t| t.trim().parse().with_context(|| format!("unknown algorithm {t:?}")))
        .collect::<Result<Vec<BenchTarget>>>()?;
    targets.sort();
    targets.dedup();
    Ok(targets)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { algorithms, n, y, reps, precision, seed, epsilon_factor, cap_fraction, out, workers } => {
            let config = BenchConfig {
                targets: parse_targets(&algorithms)?,
                ns: parse_n_list(&n)?,
                ys: parse_y_list(&y)?,
                replicates: reps,
                precision,
                seed,
                epsilon_factor,
                cap_fraction,
                workers,
            };
            let records = run_grid(&config)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&records, BufWriter::new(file))?;
            let failed = records.iter().filter(|r| r.is_error()).count();
            if failed > 0 {
                eprintln!("{failed} of {} cells failed; see the error rows in {}", records.len(), out.display());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Aggregate { input, out } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let rows = aggregate_rmse(&read_csv(BufReader::new(file))?)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_rmse_csv(&rows, BufWriter::new(file))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
