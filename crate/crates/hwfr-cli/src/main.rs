//! `hwfr` — functional regression with Haar wavelet bases, on the command
//! line.
//!
//! Subcommands cover the full workflow: `simulate` datasets with known
//! ground truth, `fit` the penalized model with level/penalty tuning,
//! `predict` new responses, assess significance (`permute`), stability
//! (`bootstrap`), and out-of-sample fit (`r2`), and `export` plot-ready
//! CSV slices of any grid file.
//!
//! Every command resolves its configuration from flags, an optional JSON
//! config file, and defaults (in that order), writes the resolved
//! configuration next to its results, and is byte-for-byte reproducible
//! from that file at any thread count.

mod commands;
mod config;
mod error;
mod formats;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "hwfr",
    version,
    about = "Functional linear regression with Haar wavelet domain selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with known ground truth.
    Simulate(commands::simulate::SimulateParams),
    /// Fit the penalized functional regression on a dataset.
    Fit(commands::fit::FitParams),
    /// Score new predictors with a fitted model.
    Predict(commands::predict::PredictParams),
    /// Permutation significance bands and the max-statistic global test.
    Permute(commands::permute::PermuteParams),
    /// Bootstrap inclusion frequencies.
    Bootstrap(commands::bootstrap::BootstrapParams),
    /// Cross-validated predictive R² with nested tuning.
    R2(commands::r2::R2Params),
    /// Export a grid file as a plot-ready CSV.
    Export(commands::export::ExportParams),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(p) => commands::simulate::run(p),
        Command::Fit(p) => commands::fit::run(p),
        Command::Predict(p) => commands::predict::run(p),
        Command::Permute(p) => commands::permute::run(p),
        Command::Bootstrap(p) => commands::bootstrap::run(p),
        Command::R2(p) => commands::r2::run(p),
        Command::Export(p) => commands::export::run(p),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
