use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "omedian", version, about = "Online bidding and oblivious k-median experiments")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory for CSV/JSON artifacts. Without it results go to stdout only.
    #[arg(long, global = true, env = "OMEDIAN_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Random Euclidean instance with rational distances.
    Gen(GenArgs),
    /// Offline solutions for every budget k.
    Solve(SolveArgs),
    /// Online bidding strategies and bounds.
    #[command(subcommand)]
    Bid(BidCommand),
    /// Nested facility chains.
    #[command(subcommand)]
    Oblivious(ObliviousCommand),
    /// Lower-bound gadgets.
    #[command(subcommand)]
    Hardness(HardnessCommand),
}

impl Command {
    /// Short name used for artifact files.
    pub fn stem(&self) -> String {
        match self {
            Command::Gen(_) => "instance".into(),
            Command::Solve(_) => "solve".into(),
            Command::Bid(b) => match b {
                BidCommand::Det(_) => "bid_det".into(),
                BidCommand::Rand(_) => "bid_rand".into(),
                BidCommand::Optimal(_) => "bid_optimal".into(),
                BidCommand::Dual(_) => "bid_dual".into(),
            },
            Command::Oblivious(ObliviousCommand::Build(a)) => format!("chain_{}", a.mode.as_str()),
            Command::Hardness(HardnessCommand::Adv(a)) => format!("adversarial_m{}", a.m),
            Command::Hardness(HardnessCommand::Kl(a)) => format!("kl_l{}", a.l),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub customers: usize,
    #[arg(long)]
    pub facilities: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Exact,
    Local,
    Greedy,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    pub solver: SolverArg,
    /// Improvement threshold for local search.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BidCommand {
    /// Doubling bids restricted to the universe.
    Det(UniverseArgs),
    /// Randomized geometric bids, averaged over seeds.
    Rand(RandArgs),
    /// Exactly optimal deterministic bids on [n].
    Optimal(OptimalArgs),
    /// Dual certificate lower-bounding randomized bidders.
    Dual(DualArgs),
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct UniverseArgs {
    /// Universe {1, ..., n}.
    #[arg(long)]
    pub n: Option<u64>,
    /// JSON array of positive universe elements.
    #[arg(long)]
    pub universe: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RandArgs {
    #[command(flatten)]
    pub universe: UniverseArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimalArgs {
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DualArgs {
    #[arg(long = "U")]
    pub u: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObliviousCommand {
    /// Build a chain from an offline solution and a bid set, then verify it.
    Build(BuildArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Cost,
    Size,
}

impl ModeArg {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeArg::Cost => "cost",
            ModeArg::Size => "size",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BidderArg {
    Det,
    Rand,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Cost)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    pub solver: SolverArg,
    #[arg(long, value_enum, default_value_t = BidderArg::Det)]
    pub bidder: BidderArg,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Accept non-metric instances in cost mode and report their λ*.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HardnessCommand {
    /// Layered gadget with clusters M_1..M_m.
    Adv(AdvArgs),
    /// Star gadget for two budgets k < l.
    Kl(KlArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AdvArgs {
    #[arg(long)]
    pub m: usize,
    /// Exhaustively check the gadget's covering property (m <= 5).
    #[arg(long)]
    pub verify: bool,
    /// Print the instance instead of the summary.
    #[arg(long)]
    pub emit_instance: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct KlArgs {
    #[arg(long)]
    pub l: usize,
    /// Also run the two-option algorithm on the gadget.
    #[arg(long)]
    pub run_algorithm: bool,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Print the instance instead of the summary.
    #[arg(long)]
    pub emit_instance: bool,
}
