//! `flawwalk`: generate instances, check convergence conditions, run the
//! walks, verify structural properties and summarize runs.
//!
//! Exit status: 0 success, 1 condition or check failed, 2 budget exceeded,
//! 3 contract violation, 4 bad input.

mod commands;
mod instance;
mod record;
mod trace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use instance::AppKind;

#[derive(Parser)]
#[command(name = "flawwalk", version, about = "Focused random walks over flaws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance to stdout (or --out).
    Generate(GenerateArgs),
    /// Evaluate a convergence criterion and print the per-flaw ratios.
    Check(CheckArgs),
    /// Run a walk and emit one run record per seed.
    Solve(SolveArgs),
    /// Run structural checks on a small instance.
    Verify(VerifyArgs),
    /// Summarize run records read from files or stdin.
    Stats(StatsArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// latin, matching, coloring, colorblind or table.
    #[arg(long)]
    app: AppKind,
    /// Instance file.
    instance: PathBuf,
    /// Number of colors for coloring instances (default Δ+1).
    #[arg(long)]
    colors: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WalkKind {
    Uniform,
    Recursive,
    Lefthanded,
}

impl WalkKind {
    pub fn name(self) -> &'static str {
        match self {
            WalkKind::Uniform => "uniform",
            WalkKind::Recursive => "recursive",
            WalkKind::Lefthanded => "lefthanded",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Symmetric,
    Asymmetric,
    Cluster,
    Lefthanded,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    app: AppKind,
    /// n for Latin, the vertex count 2n for matching, V for graphs.
    #[arg(long)]
    size: usize,
    /// Color multiplicity: Δ for Latin, q for matching.
    #[arg(long)]
    multiplicity: Option<usize>,
    /// Edge probability for graph instances.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accept parameters outside the guaranteed range.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionArgs {
    /// Criterion to evaluate (default follows the walk).
    #[arg(long)]
    criterion: Option<CriterionArg>,
    /// theorem1, uniform:<value>, uniform:<a>/<b> or file:<path>.
    #[arg(long)]
    mu: Option<String>,
    /// Largest neighborhood enumerated subset by subset.
    #[arg(long, default_value_t = 20)]
    cap: usize,
    /// Responsibility digraph file for the left-handed criterion and walk.
    #[arg(long)]
    responsibility: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    condition: ConditionArgs,
    /// Walk whose default criterion is used when --criterion is absent.
    #[arg(long, value_enum, default_value_t = WalkKind::Uniform)]
    walk: WalkKind,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    condition: ConditionArgs,
    #[arg(long, value_enum, default_value_t = WalkKind::Uniform)]
    walk: WalkKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Failure exponent: the budget bounds the failure probability by 2^-s.
    #[arg(long, default_value_t = 20)]
    s: u32,
    /// Explicit step budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Run even if the criterion fails (requires --budget).
    #[arg(long)]
    force: bool,
    /// Trace file; with several runs the seed is appended to the name.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the last sink found here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Comma-separated subset of atomicity, causality, reconstruction,
    /// responsibility; or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Largest number of states enumerated.
    #[arg(long, default_value_t = 1 << 16)]
    cap: usize,
    /// Check this trace instead of fresh runs in the reconstruction check.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Fresh uniform runs for the reconstruction check.
    #[arg(long, default_value_t = 20)]
    runs: u64,
    #[arg(long, default_value_t = 200)]
    budget: u64,
    #[arg(long)]
    responsibility: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Files holding run records; stdin when absent.
    files: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                commands::EXIT_INPUT
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Check(a) => commands::check(a),
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Stats(a) => commands::stats(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_INPUT)
        }
    }
}
