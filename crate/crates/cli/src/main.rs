//! `speedpower`: generate voyages, fit calm-water curves, train the
//! network and benchmark everything against each other.

mod commands;
mod config;
mod seed;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(
    name = "speedpower",
    version,
    about = "Ship speed-power modelling from operational data"
)]
struct Cli {
    /// Run configuration (JSON, schema "runconfig/1").
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fail instead of flagging when a wave theory is used outside its
    /// validity range.
    #[arg(long, global = true)]
    strict_validity: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic voyage CSV.
    Generate {
        /// Scenario file (schema "scenario/1"); the reference scenario when absent.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Record count for the reference scenario.
        #[arg(long, default_value_t = 20_000)]
        records: usize,
    },
    /// Fit the calm-water model on weather-corrected calm-sea records.
    FitCalm {
        #[arg(long)]
        data: PathBuf,
    },
    /// Cross-validate and train the feedforward network.
    TrainNn {
        #[arg(long)]
        data: PathBuf,
    },
    /// Score calm models x wave theories (and optionally the network).
    Benchmark {
        #[arg(long)]
        data: PathBuf,
        /// Calm-water model file written by `fit-calm`.
        #[arg(long)]
        calm_model: PathBuf,
        /// Extra calm-water curves, e.g. a sea-trial fit, as NAME=PATH.
        #[arg(long = "reference", value_name = "NAME=PATH")]
        references: Vec<String>,
        /// Network file written by `train-nn`.
        #[arg(long)]
        nn_model: Option<PathBuf>,
    },
    /// Added wave resistance against relative heading for each theory.
    PolarSweep,
    /// MAE, MAPE, MBE and R2 of two columns of a CSV file.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "actual")]
        actual_column: String,
        #[arg(long, default_value = "predicted")]
        predicted_column: String,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed_overridden = cli.seed.is_some();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    cfg.strict_validity |= cli.strict_validity;
    cfg.validate()?;

    match cli.command {
        Command::Generate { scenario, records } => {
            commands::generate(&cfg, scenario.as_deref(), records, seed_overridden)
        }
        Command::FitCalm { data } => commands::fit_calm(&cfg, &data),
        Command::TrainNn { data } => commands::train_nn(&cfg, &data),
        Command::Benchmark {
            data,
            calm_model,
            references,
            nn_model,
        } => commands::benchmark(&cfg, &data, &calm_model, &references, nn_model.as_deref()),
        Command::PolarSweep => commands::polar_sweep(&cfg),
        Command::Metrics {
            input,
            actual_column,
            predicted_column,
        } => commands::metrics(&cfg, &input, &actual_column, &predicted_column),
    }
}
