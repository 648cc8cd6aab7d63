mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Rumour detection experiments: 39 hand-crafted features versus sentence
/// embeddings across six classifiers.
#[derive(Parser, Debug)]
#[command(name = "rumour", version)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for splits, folds and training (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert a PHEME directory tree to canonical JSONL.
    Ingest {
        root: PathBuf,
        output: PathBuf,
    },
    /// Write the 39-feature matrix of a JSONL dataset as CSV.
    Features {
        input: PathBuf,
        output: PathBuf,
        /// Lexicon directory; the bundled lists are used otherwise.
        #[arg(long)]
        lexicons: Option<PathBuf>,
    },
    /// Build an embedding store covering every tweet of a JSONL dataset.
    Embed(EmbedArgs),
    /// Hold-out training and evaluation for each representation and algorithm.
    TrainEval(RunArgs),
    /// k-fold cross-validation over the training partition.
    Cv(RunArgs),
    /// Tabulate report CSVs with embedding-minus-features deltas.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// precomputed or remote.
    #[arg(long)]
    pub mode: Option<String>,
    /// Source store for precomputed mode.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Service URL for remote mode.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Existing store whose vectors are reused instead of re-embedding.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Canonical JSONL dataset (overrides the config).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Embedding store (overrides the config).
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    /// Comma-separated representations: features39, embedding.
    #[arg(long, value_delimiter = ',')]
    pub representations: Option<Vec<String>>,
    /// Number of folds (cv only).
    #[arg(long)]
    pub k: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_target(false)
        .init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
