use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use ceda2_cli::config::{ExperimentConfig, Overrides};
use ceda2_cli::runner;
use ceda2_cli::summary::{split_settings, summarize};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ceda2", about = "EDA² and C-EDA² experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Independent runs of one algorithm over a problem set.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: Overrides,
    },
    /// EDA² over the population-size by archive-length grid.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Clusters the best share of a uniform sample and writes the decision graph.
    DemoCluster {
        #[arg(long, default_value = "cec2013/f5")]
        problem: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long = "selection-ratio", default_value_t = 0.35)]
        selection_ratio: f64,
        #[arg(long, default_value_t = 0.8)]
        alpha: f64,
        #[arg(long, default_value = "results/dsts")]
        out: PathBuf,
    },
    /// Summary tables from existing runs.csv files.
    Report {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Also write summary.csv and stats.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_tables(records: &[ceda2_cli::records::RunRecord]) -> Result<()> {
    for group in split_settings(records) {
        print!("{}", summarize(&group)?.render());
    }
    Ok(())
}

fn main_inner() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, flags } => {
            let config = ExperimentConfig::load(config.as_deref(), &flags)?;
            let records = runner::run_experiment(&config)?;
            if !records.is_empty() {
                print_tables(&records)?;
            }
            eprintln!("results in {}", config.out.display());
        }
        Command::Sweep { config, flags } => {
            let config = ExperimentConfig::load(config.as_deref(), &flags)?;
            runner::sweep(&config)?;
            eprintln!("grid in {}", config.out.join("sweep.csv").display());
        }
        Command::DemoCluster { problem, seed, count, selection_ratio, alpha, out } => {
            let demo = runner::demo_cluster(&problem, seed, count, selection_ratio, alpha, &out)?;
            println!(
                "{} clusters among {} points, threshold {:.6}",
                demo.result.cluster_count(),
                demo.points.len(),
                demo.result.threshold
            );
        }
        Command::Report { runs, out } => print!("{}", runner::report(&runs, out.as_deref())?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
