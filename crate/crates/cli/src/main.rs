//! `pgee` command-line tool.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pgee::eval::Method;
use pgee::principal::{DEFAULT_ELBOW, DEFAULT_FLOOR};
use pgee::{ModelKind, PrincipalConfig, SmallClassPolicy, ThresholdRule, VarianceEstimator};

#[derive(Parser, Debug)]
#[command(name = "pgee", version, about = "Principal graph encoder embedding")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "PGEE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed a labeled graph and score its communities.
    Embed(EmbedArgs),
    /// Sample a graph from a simulation preset or a model file.
    Simulate(SimulateArgs),
    /// Cross-validated classification error on presets or a labeled graph.
    Evaluate(EvaluateArgs),
    /// Time embedding and scoring.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ThresholdArgs {
    /// Fixed threshold; the elbow threshold is still reported.
    #[arg(long, conflicts_with_all = ["elbow", "floor"])]
    pub epsilon: Option<f64>,
    /// Which elbow of the sorted scores sets the threshold.
    #[arg(long)]
    pub elbow: Option<usize>,
    /// Lower bound on the elbow threshold.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Within-class variance estimator.
    #[arg(long, default_value = "moment", value_parser = parse_variance)]
    pub variance: VarianceEstimator,
    /// Score classes with fewer than two labeled vertices as 0 instead of failing.
    #[arg(long)]
    pub drop_small_classes: bool,
}

impl ThresholdArgs {
    pub fn config(&self) -> PrincipalConfig {
        let threshold = match self.epsilon {
            Some(eps) => ThresholdRule::Fixed(eps),
            None => ThresholdRule::Elbow {
                elbow: self.elbow.unwrap_or(DEFAULT_ELBOW),
                floor: self.floor.unwrap_or(DEFAULT_FLOOR),
            },
        };
        PrincipalConfig {
            threshold,
            estimator: self.variance,
            small_classes: if self.drop_small_classes {
                SmallClassPolicy::Drop
            } else {
                SmallClassPolicy::Error
            },
        }
    }
}

fn parse_variance(s: &str) -> Result<VarianceEstimator, String> {
    match s {
        "moment" => Ok(VarianceEstimator::Moment),
        "unbiased" => Ok(VarianceEstimator::Unbiased),
        _ => Err(format!(
            "unknown variance estimator `{s}` (moment or unbiased)"
        )),
    }
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Edge list (`i j` or `i j w` per line).
    #[arg(long)]
    pub graph: PathBuf,
    /// Labels, one per line or `vertex,label` rows; 0 means unknown.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "pgee")]
    pub method: Method,
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep edge direction instead of symmetrizing.
    #[arg(long)]
    pub directed: bool,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["model", "spec"])))]
pub struct SimulateArgs {
    /// Simulation preset: sbm, dcsbm or rdpg.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Model file (TOML, as written by this command).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Vertex count; overrides the model file's.
    #[arg(long, required_unless_present = "spec")]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["model", "graph"])))]
pub struct EvaluateArgs {
    /// Simulation preset to sweep over `--n-list`.
    #[arg(long, requires = "n_list")]
    pub model: Option<ModelKind>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<usize>,
    /// Labeled graph to cross-validate on.
    #[arg(long, requires = "labels")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Method to report; both are always computed.
    #[arg(long)]
    pub method: Option<Method>,
    /// Folds; 0 skips classification in a preset sweep.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long)]
    pub seed: u64,
    /// Fraction of labeled vertices moved to noise classes.
    #[arg(long, conflicts_with = "model")]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 30, requires = "noise")]
    pub noise_classes: usize,
    /// Spread classes smaller than the fold count instead of failing.
    #[arg(long)]
    pub lenient_folds: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value = "sbm")]
    pub model: ModelKind,
    #[arg(long, value_delimiter = ',', required_unless_present = "large")]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Also run the large configuration (n = 100000, K = 40, about 1e7
    /// edges) and its edge-count ladder; permits sizes above the default cap.
    #[arg(long)]
    pub large: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Embed(a) => commands::embed(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.reason());
            ExitCode::from(failure.code())
        }
    }
}
