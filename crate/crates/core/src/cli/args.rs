use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(name = "geiringer", version, about = "Crossover chains on rollout populations and their limiting frequencies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Parse and validate a population file.
    Validate(PopArgs),
    /// Downward sets, terminal counts and order counts.
    Stats(PopArgs),
    /// Closed-form limiting frequency of each schema.
    Predict(PredictArgs),
    /// Expected payoff of an action under the limiting distribution.
    Evaluate(EvaluateArgs),
    /// Apply a sequence of crossover operators and print the result.
    Apply(ApplyArgs),
    /// Simulate the crossover chain and estimate schema frequencies.
    Mix(MixArgs),
    /// Enumerate the orbit and compute exact frequencies.
    Orbit(OrbitArgs),
    /// Prediction, exact orbit value and chain estimate side by side.
    Compare(CompareArgs),
    /// Finite Markov chain analysis.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct PopArgs {
    /// Population file.
    pub population: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    pub population: PathBuf,
    /// Schema such as "alpha: 1, 2 -> #" (repeatable).
    #[arg(long = "schema", required = true)]
    pub schemata: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    pub population: PathBuf,
    #[arg(long)]
    pub action: String,
    /// File of `TERMINAL = RATIONAL` lines.
    #[arg(long)]
    pub payoffs: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ApplyArgs {
    pub population: PathBuf,
    /// Comma-separated operators, e.g. "chi(1,c,d), nu(6,a,b), swap(1,2)".
    #[arg(long)]
    pub ops: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// Homogeneous chain under the uniform mixing distribution.
    None,
    /// Uniform and lazy distributions in turn.
    Alternating,
    /// Uniform or lazy, chosen by a fair coin each step.
    Random,
    /// Parity of the number of returns to the starting population.
    ReturnParity,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, env = "GEIRINGER_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    /// Transitions discarded before averaging.
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MixArgs {
    pub population: PathBuf,
    #[arg(long = "schema", required = true)]
    pub schemata: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Run on the inflation of the population by this factor.
    #[arg(long)]
    pub inflate: Option<u32>,
    #[arg(long)]
    pub include_transpositions: bool,
    /// Record the running estimate every K populations.
    #[arg(long, default_value_t = 0)]
    pub trace_every: usize,
    #[arg(long, value_enum, default_value_t = ScheduleKind::None)]
    pub schedule: ScheduleKind,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub out: OutputFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    pub population: PathBuf,
    #[arg(long = "schema")]
    pub schemata: Vec<String>,
    #[arg(long, default_value_t = geiringer::orbit::DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub include_transpositions: bool,
    #[arg(long)]
    pub inflate: Option<u32>,
    /// Enumerate rollout shapes only (letters forgotten); same frequencies,
    /// far fewer members.
    #[arg(long)]
    pub shapes: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    pub population: PathBuf,
    #[arg(long = "schema", required = true)]
    pub schemata: Vec<String>,
    /// Largest inflation factor checked against the orbit.
    #[arg(long, default_value_t = 2)]
    pub max_inflate: u32,
    #[arg(long, default_value_t = geiringer::orbit::DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub include_transpositions: bool,
    /// Use the full labeled orbit instead of the shape orbit.
    #[arg(long)]
    pub full_orbit: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub out: OutputFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    /// CSV matrix, one row per line.
    pub matrix: PathBuf,
    /// Exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyzeCommand {
    /// Stationary distribution.
    Stationary(MatrixArgs),
    /// Quotient chain over a partition.
    Lump {
        #[command(flatten)]
        #[serde(flatten)]
        matrix: MatrixArgs,
        /// One block id per state per line.
        #[arg(long)]
        partition: PathBuf,
    },
    /// Two-block ratio for a set of states and its complement.
    Ratio {
        #[command(flatten)]
        #[serde(flatten)]
        matrix: MatrixArgs,
        /// Comma-separated 0-based state indices of A.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        /// Rare set U for the stationary-ratio bounds.
        #[arg(long, value_delimiter = ',')]
        rare: Vec<usize>,
    },
    /// Contraction rate bound `1 - n·min entry`.
    Contraction(MatrixArgs),
    /// Common reachable index of a family of matrices.
    ReachableIndex {
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
        #[arg(long, default_value_t = 16)]
        k_max: usize,
    },
    /// Distance to the shared stationary distribution under a schedule.
    Schedule {
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Starting distribution; defaults to the point mass at state 0.
        #[arg(long, value_delimiter = ',')]
        x0: Vec<f64>,
        /// Use equal convex weights instead of cycling through the family.
        #[arg(long)]
        mixture: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        out: OutputFormat,
    },
}
