//! `hullpeel`: count peeling sequences, build and certify constructions,
//! verify bounds and lemmas, emit bound curves, and search for low counts.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "hullpeel", version, about = "Exact toolkit for convex-hull peeling sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the peeling sequences of a point set.
    Count(CountArgs),
    /// Build a recursive construction and certify its block invariant.
    Construct(ConstructArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Emit lower bound, exact counts and upper bound per n as CSV.
    Curve(CurveArgs),
    /// Hill-descent search for planar sets with few peeling sequences.
    Search(SearchArgs),
}

#[derive(Args)]
pub struct CountArgs {
    /// A single-record .pts file.
    pub file: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Cross-check against the brute-force counter (at most 12 points).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    Ternary,
    Threeblock,
    Simplex,
}

#[derive(Args)]
pub struct ConstructArgs {
    pub kind: KindArg,
    /// Recursion depth (ternary, simplex).
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of points (threeblock).
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension (simplex).
    #[arg(long)]
    pub d: Option<usize>,
    /// Output .pts path; the .blocks and .report.json files go next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Random walks per certified assembly above 12 points.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Required when the construction has more than 12 points.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Constants,
    Lemmas,
    SmallValues,
    Invariant,
    BoundsChain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaSuite {
    Entropy,
    FloorCeil,
    Coef,
    Divide,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub target: Target,
    #[arg(long)]
    pub json: bool,
    /// lemmas: run only these suites (repeatable).
    #[arg(long = "only", value_enum)]
    pub only: Vec<LemmaSuite>,
    /// lemmas: largest n of the entropy grid.
    #[arg(long, default_value_t = 200)]
    pub entropy_max: u64,
    /// lemmas: largest n of the floor/ceiling check.
    #[arg(long, default_value_t = 500)]
    pub floor_ceil_max: u64,
    /// lemmas: coefficient range; below 24 exact verdicts are reported per n.
    #[arg(long, default_value_t = 24)]
    pub coef_lo: u64,
    #[arg(long, default_value_t = 1000)]
    pub coef_hi: u64,
    /// lemmas: number of random subadditivity instances.
    #[arg(long, default_value_t = 50)]
    pub divide: usize,
    /// Seed for the randomized suites (subadditivity, sampled invariant).
    #[arg(long)]
    pub seed: Option<u64>,
    /// bounds-chain: skip malformed records of --file instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// invariant: point set; bounds-chain: extra set checked against the lower bound.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// invariant: block tree.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// invariant: walk every reachable state instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n_max: u64,
    /// CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exact counts of the three-block construction up to this n.
    #[arg(long, default_value_t = 12)]
    pub exact_cap: u64,
    /// Required when --exact-cap exceeds 12.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 16)]
    pub resolution: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(a) => commands::count(a),
        Command::Construct(a) => commands::construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Curve(a) => commands::curve(a),
        Command::Search(a) => commands::search(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hullpeel: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
