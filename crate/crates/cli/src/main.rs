//! `mpfp`: fingerprint extraction, ranking, evaluation and stability checks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpfp::filtration::ThresholdStrategy;
use mpfp::metric::{RowMetric, WassersteinOrder};
use mpfp::mpfingerprint::Modality;
use mpfp::vectorize::Vectorization;

#[derive(Parser)]
#[command(name = "mpfp", version, about = "Multiparameter persistence fingerprints for molecular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract stacked fingerprints for every compound of a library.
    Extract(ExtractArgs),
    /// Rank a target's pool against its templates.
    Rank(RankArgs),
    /// Stratified cross-validation of template ranking.
    Evaluate(EvaluateArgs),
    /// Compare fingerprint distances with slice-wise Wasserstein distances on perturbed molecules.
    Stability(StabilityArgs),
    /// Time extraction on random molecules.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Sdf,
    Json,
}

#[derive(Args, Clone)]
pub struct LibraryArgs {
    /// Molecule files (SDF or JSON).
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
}

#[derive(Args, Clone)]
pub struct PipelineArgs {
    #[arg(long, value_delimiter = ',', default_value = "mass,charge,bond")]
    pub modalities: Vec<Modality>,
    /// betti, landscape[:level], silhouette[:power], entropy, image[:RxC[:sigma]]
    #[arg(long, default_value = "betti")]
    pub vectorization: Vectorization,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub dims: Vec<u8>,
    /// unique, quantile:M or uniform:M
    #[arg(long, default_value = "quantile:8")]
    pub thresholds: ThresholdStrategy,
    /// Grid cap; defaults to the largest hop distance in the library.
    #[arg(long)]
    pub kcap: Option<u32>,
}

#[derive(Args, Clone)]
pub struct WorkerArgs {
    #[arg(long, env = "TODD_WORKERS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

#[derive(Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub library: LibraryArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub workers: WorkerArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Exit with status 2 if any compound fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ScoreArg {
    Min,
    Mean,
}

#[derive(Args)]
pub struct RankArgs {
    /// Directory written by `extract`.
    #[arg(long)]
    pub fingerprints: PathBuf,
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value = "min")]
    pub score: ScoreArg,
    /// Skip per-coordinate standardization.
    #[arg(long)]
    pub raw: bool,
    /// Ranking TSV; written to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub fingerprints: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "min")]
    pub score: ScoreArg,
    #[arg(long)]
    pub raw: bool,
    /// Train a linear metric on each fold's training compounds.
    #[arg(long)]
    pub train: bool,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long)]
    pub output_dim: Option<usize>,
    /// JSON report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RowMetricArg {
    L1,
    L2,
    Sup,
}

impl From<RowMetricArg> for RowMetric {
    fn from(m: RowMetricArg) -> Self {
        match m {
            RowMetricArg::L1 => RowMetric::L1,
            RowMetricArg::L2 => RowMetric::L2,
            RowMetricArg::Sup => RowMetric::SupNorm,
        }
    }
}

#[derive(Args)]
pub struct StabilityArgs {
    /// Molecule files; random molecules are generated when omitted.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Random molecules to generate without `--input`.
    #[arg(long, default_value_t = 50)]
    pub molecules: usize,
    #[arg(long, default_value = "landscape")]
    pub vectorization: Vectorization,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub dims: Vec<u8>,
    #[arg(long, default_value = "quantile:8")]
    pub thresholds: ThresholdStrategy,
    #[arg(long)]
    pub kcap: Option<u32>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest change of any atomic mass.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long = "constant", default_value_t = 1.0)]
    pub constant: f64,
    /// Wasserstein order: a real >= 1 or `inf`.
    #[arg(long, default_value = "inf")]
    pub p: WassersteinOrder,
    /// Row norm; the vectorization's native norm when omitted.
    #[arg(long, value_enum)]
    pub row_metric: Option<RowMetricArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1000)]
    pub molecules: usize,
    #[arg(long, default_value_t = 30)]
    pub max_atoms: usize,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub workers: WorkerArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Extract(args) => commands::extract(&args),
        Command::Rank(args) => commands::rank(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Stability(args) => commands::stability(&args),
        Command::Bench(args) => commands::bench(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
