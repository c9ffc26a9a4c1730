//! `scbp` command line: learn structure envelopes, recover single files, run
//! batch experiments, and re-aggregate existing trial data.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.
//! Diagnostics go to stderr, results to stdout, and every subcommand echoes
//! its fully resolved configuration before doing work.

mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "scbp",
    version,
    about = "Sparse recovery with basis pursuit and structure-constrained basis pursuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a coefficient-bound envelope from a training corpus.
    Learn(LearnArgs),
    /// Compressively sample one audio file and recover it.
    Recover(RecoverArgs),
    /// Run a batch BP/SCBP comparison campaign from a config file.
    Experiment(ExperimentArgs),
    /// Re-aggregate an existing trials.csv without re-solving.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct LearnArgs {
    /// Phoneme or corpus tag stored in the envelope.
    #[arg(long)]
    label: String,
    /// Output envelope path.
    #[arg(long)]
    out: PathBuf,
    /// Learn from the synthetic corpus generated with this seed.
    #[arg(long)]
    synthetic_seed: Option<u64>,
    /// Synthetic corpus: number of training blocks.
    #[arg(long, default_value_t = 200)]
    n_train: usize,
    /// Synthetic corpus: block length.
    #[arg(long, default_value_t = 256)]
    block_length: usize,
    /// Synthetic corpus: active low-frequency coefficients per block.
    #[arg(long, default_value_t = 10)]
    sparsity: usize,
    /// Synthetic corpus: fraction of the spectrum forming the low band.
    #[arg(long, default_value_t = 0.25)]
    band_fraction: f64,
    /// Synthetic corpus: relative amplitude of out-of-band coefficients.
    #[arg(long, default_value_t = 0.01)]
    noise_floor: f64,
    /// Learn from `<audio> <transcript>` pairs listed in this manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Learn from a TIMIT-style directory (WAV-converted audio).
    #[arg(long)]
    timit_dir: Option<PathBuf>,
    /// Partition subdirectory used with --timit-dir.
    #[arg(long, default_value = "TRAIN")]
    partition: String,
}

#[derive(Args)]
pub struct RecoverArgs {
    /// Input audio: mono PCM16 WAV, or raw PCM16 with --raw-rate.
    #[arg(long)]
    input: PathBuf,
    /// Treat the input as headerless PCM16 at this sample rate.
    #[arg(long)]
    raw_rate: Option<u32>,
    /// Reference audio for NMSE reporting.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Envelope file (required for --method scbp).
    #[arg(long)]
    envelope: Option<PathBuf>,
    /// Compression ratio n/m.
    #[arg(long, default_value_t = 5.0)]
    cr: f64,
    /// Residual budget for SCBP.
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    /// Base seed for the per-block sensing matrices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recovery method.
    #[arg(long, default_value = "bp")]
    method: String,
    /// Recovered WAV path (defaults to `<input>.recovered.wav`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// Experiment config file (flat `key = value`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for trials.csv, summary.txt, histogram.csv.
    #[arg(long)]
    out: PathBuf,
    /// Cap runner parallelism (default: available cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Existing trials.csv to re-aggregate.
    #[arg(long)]
    trials: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Histogram bin count over [0, 1).
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Learn(args) => commands::learn(args),
        Command::Recover(args) => commands::recover(args),
        Command::Experiment(args) => commands::experiment(args),
        Command::Report(args) => commands::report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
