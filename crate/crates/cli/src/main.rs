use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod manifest;

/// Threshold sweeps, lag-model studies and annealed dichotomization of
/// valued networks.
#[derive(Debug, Parser)]
#[command(name = "dichot", version, about)]
struct Cli {
    /// Master seed; overrides any seed in the config file.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,

    /// TOML configuration for the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a valued graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Replicated threshold sweep on simulated graphs.
    Sweep(SweepArgs),
    /// Lag-model efficiency across a threshold ladder.
    LmSweep(LmSweepArgs),
    /// Grid study of lag-model efficiency.
    Batch,
    /// Annealed search for a binary graph close to its valued parent.
    Anneal(AnnealArgs),
    /// Threshold sweep of one or more real networks.
    Analyze(AnalyzeArgs),
    /// Edge membership per threshold.
    Layers(LayersArgs),
    /// Bin t-statistics from a study table against a reference t density.
    Tsummary(TsummaryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Edgelist,
    Correlation,
    Rank,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file format.
    #[arg(long, value_enum, default_value = "edgelist")]
    format: InputFormat,
    /// Treat edge lists as undirected.
    #[arg(long)]
    undirected: bool,
    /// Unit label for edge-list weights.
    #[arg(long, default_value = "units")]
    unit: String,
    /// Use absolute correlations instead of clamping negatives to zero.
    #[arg(long)]
    absolute: bool,
    /// Keep only mutual strength, min(w_ij, w_ji), before dichotomizing.
    #[arg(long)]
    mutual: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of nodes; overrides the config.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Replicate graphs; overrides the config.
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LmSweepArgs {
    /// Use this edge list instead of a simulated graph.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    format: InputArgs,
    /// Outcome draws on the graph; overrides the config.
    #[arg(long)]
    sims: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    /// Valued graph to anneal against; simulated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    format: InputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// One or more network files, analyzed in the order given.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    format: InputArgs,
}

#[derive(Debug, Args)]
pub struct LayersArgs {
    /// Network file to layer.
    input: PathBuf,
    #[command(flatten)]
    format: InputArgs,
    /// Explicit thresholds, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "densities")]
    thresholds: Vec<f64>,
    /// Edges-per-node targets, comma separated.
    #[arg(long, value_delimiter = ',')]
    densities: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct TsummaryArgs {
    /// Study table written by `batch`.
    input: PathBuf,
    /// Column holding the t-statistics.
    #[arg(long, default_value = "beta_t")]
    column: String,
    /// Keep rows for this criterion only.
    #[arg(long, default_value = "min_beta_mse")]
    criterion: String,
    /// Degrees of freedom of the reference t density.
    #[arg(long, default_value_t = 50.0)]
    df: f64,
    /// Bins cover [-limit, limit]; values outside land in the end bins.
    #[arg(long, default_value_t = 5.0)]
    limit: f64,
    #[arg(long, default_value_t = 0.5)]
    width: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
