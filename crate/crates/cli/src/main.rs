use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod manifest;

use commands::Context;
use config::FileConfig;
use error::{CliError, EXIT_USAGE};

/// River-network rewiring toolkit: gauge QC, dense reachability graphs,
/// effective-resistance diagnostics and a desk-scale forecaster.
#[derive(Debug, Parser)]
#[command(name = "rivergraph", version)]
struct Cli {
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random choice in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Screen gauges, drop failed stations and bypass them in the network.
    Qc(QcArgs),
    /// Build an adjacency matrix from a river network.
    Rewire(RewireArgs),
    /// Effective-resistance report for an adjacency matrix.
    Resist(ResistArgs),
    /// Train and evaluate the forecaster on gauge data.
    Train(TrainArgs),
    /// Write a synthetic basin: edge list plus one gauge file per station.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct QcArgs {
    /// Edge list `src,dst,stream_length_km,elevation_diff_m`.
    #[arg(long)]
    pub edges: PathBuf,
    /// Optional node table with a `gauge_id` column.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Directory of per-station CSV files.
    #[arg(long)]
    pub gauges: PathBuf,
    /// Study period start; defaults to the earliest observation.
    #[arg(long)]
    pub start: Option<String>,
    /// Study period end (exclusive); defaults to one hour past the latest observation.
    #[arg(long)]
    pub end: Option<String>,
    /// Timestamp column in the gauge files.
    #[arg(long)]
    pub timestamp_column: Option<String>,
    /// Discharge column in the gauge files.
    #[arg(long)]
    pub discharge_column: Option<String>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RewireArgs {
    /// Edge list `src,dst,stream_length_km,elevation_diff_m`.
    #[arg(long)]
    pub edges: PathBuf,
    /// Optional node table; fixes the node order.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// isolated, topology, dense or learned.
    #[arg(long)]
    pub kind: Option<String>,
    /// Kernel width in km, or `auto`.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Kernel weights below this are dropped before normalization.
    #[arg(long)]
    pub prune: Option<f64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResistArgs {
    /// Adjacency CSV written by `rewire`.
    #[arg(long)]
    pub adjacency: PathBuf,
    /// symmetric or random-walk.
    #[arg(long)]
    pub mode: Option<String>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Adjacency CSV written by `rewire`.
    #[arg(long)]
    pub adjacency: PathBuf,
    /// Directory of per-station CSV files.
    #[arg(long)]
    pub gauges: PathBuf,
    /// History length in hours.
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Forecast horizon in hours.
    #[arg(long)]
    pub beta: Option<usize>,
    /// Message-passing layers.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Hidden width of each layer.
    #[arg(long)]
    pub latent: Option<usize>,
    /// Training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Windows per gradient step.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Initial learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// adam or gd.
    #[arg(long)]
    pub optimizer: Option<String>,
    /// Leading share of the record used for training.
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Hours between training windows.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of stations.
    #[arg(long)]
    pub size: Option<usize>,
    /// Length of the hourly record.
    #[arg(long)]
    pub hours: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = (chrono::Utc::now(), std::time::Instant::now());
    let config = FileConfig::load(cli.config.as_deref())?;
    let threads = cli
        .threads
        .or(config.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if threads == 0 {
        return Err(CliError::Input("--threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        config,
        config_path: cli.config.clone(),
        threads,
        started,
    };
    match &cli.command {
        Command::Qc(args) => commands::qc(&ctx, args),
        Command::Rewire(args) => commands::rewire(&ctx, args),
        Command::Resist(args) => commands::resist(&ctx, args),
        Command::Train(args) => commands::train(&ctx, args),
        Command::Synth(args) => commands::synth(&ctx, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
