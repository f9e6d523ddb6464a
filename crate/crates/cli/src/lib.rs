//! Command-line front end: scenario files in, CSV and JSON products out.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod modal;
pub mod simulate;
pub mod spectrum;
pub mod sweep;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rotorsim::scenario::StftSettings;

pub use error::{CliError, CliResult};
use modal::{BladeSelection, ModalCase};

#[derive(Debug, Parser)]
#[command(name = "rotorsim", version, about = "Bladed rotor vibration simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its time series and derived products.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Natural frequencies of one blade, the bare shaft or the assembly.
    Modal {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        case: ModalCase,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// Stage of the blade for `--case blade` (1-based).
        #[arg(long, default_value_t = 1)]
        stage: usize,
        /// Blade for `--case blade` (1-based).
        #[arg(long, default_value_t = 1)]
        blade: usize,
    },
    /// Spectrum of one column of a CSV file with a `time` column.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        channel: String,
        /// Short-time spectrum instead of a single spectrum.
        #[arg(long)]
        stft: bool,
        /// STFT window (s).
        #[arg(long, requires = "stft", default_value_t = StftSettings::default().window)]
        window: f64,
        /// STFT overlap as a fraction of the window.
        #[arg(long, requires = "stft", default_value_t = StftSettings::default().overlap)]
        overlap: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every combination of a sweep file's axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out } => simulate::run_simulate(&config, &out).map(drop),
        Command::Modal { config, case, count, out, stage, blade } => {
            modal::run_modal(&config, case, count, BladeSelection { stage, blade }, &out).map(drop)
        }
        Command::Spectrum { input, channel, stft, window, overlap, out } => {
            let stft = stft.then_some(StftSettings { window, overlap });
            spectrum::run_spectrum(&input, &channel, stft, &out)
        }
        Command::Sweep { config, jobs, out } => sweep::run_sweep(&config, jobs, &out).map(drop),
    }
}
