use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use srl_core::simulate::{Framework, PolyTruth};
use srl_core::tuning::SelectionRule;
use srl_core::{ExpansionSpec, Family, Scheme};

use crate::config::Selection;

#[derive(Debug, Parser)]
#[command(
    name = "srl",
    version,
    about = "Sparsity-ranked lasso: fit, tune and simulate"
)]
pub struct Cli {
    /// Worker threads (default: one per core)
    #[arg(long, global = true, env = "SRL_THREADS")]
    pub threads: Option<usize>,

    /// More log output (-v info, -vv debug); RUST_LOG overrides
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a penalized path and select one model by CV or an information criterion
    Fit(FitArgs),
    /// Cross-validate the penalty over a gamma grid and write the loss surface
    Cv(CvArgs),
    /// Run a simulation experiment
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Aggregate simulation result files into mean / SE tables
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Interaction selection with LS0, APL and SRL
    Interactions(InterArgs),
    /// Univariate polynomial estimation with oracle, OLS, lasso and SRL
    Poly(PolyArgs),
}

/// Options shared by every command.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file, or a manifest.json from an earlier run
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Input CSV with a header row
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Name of the response column
    #[arg(long)]
    pub response: Option<String>,

    /// gaussian or binomial
    #[arg(long)]
    pub family: Option<Family>,

    /// none, interactions, or poly:m
    #[arg(long)]
    pub expand: Option<ExpansionSpec>,

    /// lasso, srl, cumulative, or custom (with --weights)
    #[arg(long)]
    pub scheme: Option<Scheme>,

    /// Gamma value or comma-separated grid
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,

    /// Per-group weights for the custom scheme; `inf` excludes a group
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,

    /// Number of lambda values on the path
    #[arg(long)]
    pub n_lambda: Option<usize>,

    /// Smallest lambda as a fraction of lambda_max
    #[arg(long)]
    pub lambda_min_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    /// cv[:k[:r]], bic, or aic
    #[arg(long)]
    pub select: Option<Selection>,

    /// min or one_se (cv selection only)
    #[arg(long)]
    pub rule: Option<SelectionRule>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    /// Number of folds
    #[arg(long)]
    pub folds: Option<usize>,

    /// Number of repeated partitions
    #[arg(long)]
    pub repeats: Option<usize>,

    /// min or one_se
    #[arg(long)]
    pub rule: Option<SelectionRule>,
}

#[derive(Debug, Args)]
pub struct InterArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Number of active interactions; comma-separated list runs each setting
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<usize>>,

    #[arg(long)]
    pub replicates: Option<usize>,

    /// Training rows
    #[arg(long)]
    pub n: Option<usize>,

    /// Features
    #[arg(long)]
    pub p: Option<usize>,

    /// Active main effects
    #[arg(long)]
    pub s: Option<usize>,

    #[arg(long)]
    pub noise_sd: Option<f64>,

    /// Fresh rows for prediction RMSE
    #[arg(long)]
    pub n_test: Option<usize>,

    /// CV folds for lambda selection
    #[arg(long)]
    pub folds: Option<usize>,

    /// Comma-separated subset of LS0, APL, SRL
    #[arg(long, value_delimiter = ',')]
    pub frameworks: Option<Vec<Framework>>,

    #[arg(long)]
    pub srl_gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// quadratic_fixed, random_order_10, random_quadratic, linear, or null
    #[arg(long)]
    pub truth: Option<PolyTruth>,

    /// Comma-separated fitted orders
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<u32>>,

    #[arg(long)]
    pub replicates: Option<usize>,

    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long)]
    pub noise_sd: Option<f64>,

    /// Evenly spaced points on [0, 1] for estimation RMSE
    #[arg(long)]
    pub eval_points: Option<usize>,

    /// bic, or cv[:k[:r]]
    #[arg(long)]
    pub tuning: Option<Selection>,

    /// Comma-separated gamma grid for cumulative SRL
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Simulation result CSVs
    pub inputs: Vec<PathBuf>,
}
