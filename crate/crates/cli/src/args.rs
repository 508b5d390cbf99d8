use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "roccut", version, about = "ROC curves, optimal cutoffs and simulation studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit ROC models to a biomarker CSV and report AUC and optimal cutoffs.
    Analyze(AnalyzeArgs),
    /// Run a simulation study and write the bias table.
    Simulate(SimulateArgs),
    /// Print the true AUC and cutoffs of a data-generating mechanism.
    Truth(TruthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Auto,
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    J,
    Er,
    Cz,
    Iu,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Emp,
    Bn,
    Nonpar,
    Bigamma,
    Pv,
    Semipv,
}

#[derive(Debug, Clone, Args)]
pub struct McmcArgs {
    /// Number of chains.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Iterations per chain, burn-in included.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input CSV with a header row.
    pub input: PathBuf,
    /// Biomarker column.
    #[arg(long, default_value = "value")]
    pub value: String,
    /// Group column coded 0 (healthy) / 1 (diseased).
    #[arg(long, default_value = "group")]
    pub group: String,
    /// Covariate column; enables covariate-specific curves.
    #[arg(long)]
    pub covariate: Option<String>,
    /// Covariate value at which to report (repeatable).
    #[arg(long = "at", requires = "covariate")]
    pub at: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub direction: Direction,
    /// Model to fit (repeatable).
    #[arg(long = "model", value_enum, default_values = ["bn"])]
    pub models: Vec<ModelArg>,
    #[arg(long = "criterion", value_enum, default_values = ["all"])]
    pub criteria: Vec<CriterionArg>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    /// Bootstrap resamples for emp and nonpar intervals.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    /// Write the result table as CSV here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the full-precision JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write raw posterior draws (one CSV per Bayesian model).
    #[arg(long)]
    pub dump_draws: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 200 replicates at n = 100.
    Desk,
    /// The inputs of the desk-scale acceptance study: bn_equal, bn_unequal
    /// and mixed_ii at medium AUC, emp and bn models, 200 replicates, n = 100.
    Acceptance,
    /// 1000 replicates at n = 50, 100 and 500.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixedModeArg {
    Literal,
    TwoComponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixedCovArg {
    Healthy,
    Diseased,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Mechanism name (repeatable); see `truth --help` for the list.
    #[arg(long = "mechanism")]
    pub mechanisms: Vec<String>,
    /// AUC level for no-covariate mechanisms (repeatable; default all three).
    #[arg(long = "level")]
    pub levels: Vec<String>,
    /// Per-group sample size (repeatable).
    #[arg(long = "n")]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long = "models", alias = "model", value_enum, value_delimiter = ',')]
    pub models: Vec<ModelArg>,
    #[arg(long = "criterion", value_enum, default_values = ["all"])]
    pub criteria: Vec<CriterionArg>,
    /// Covariate evaluation points for covariate mechanisms.
    #[arg(long = "at")]
    pub at: Vec<f64>,
    #[arg(long)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "literal")]
    pub mixed_mode: MixedModeArg,
    #[arg(long, value_enum, default_value = "healthy")]
    pub mixed_cov_covariate: MixedCovArg,
    /// Bias table CSV; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Long-format JSON with every replicate's estimate.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    /// bn_equal, bn_unequal, skewed_i, skewed_ii, skewed_iii, mixed_i,
    /// mixed_ii, bn_cov, skewed_cov or mixed_cov.
    pub mechanism: String,
    /// low, medium or high (no-covariate mechanisms only).
    pub level: Option<String>,
    /// Covariate value (covariate mechanisms only).
    #[arg(long)]
    pub at: Option<f64>,
    #[arg(long, value_enum, default_value = "literal")]
    pub mixed_mode: MixedModeArg,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}
