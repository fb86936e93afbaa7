//! `cubeshadows`: construct, measure, search, and check partitions of the
//! discretized cube.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 usage or I/O error.

mod commands;
mod kinds;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cubeshadows", version, about = "Exact projection volumes, influences, and bounds for partitions of the discretized cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a partition and write it as a SPART1 file.
    Construct(ConstructArgs),
    /// Measure projection volumes, mpv, balance, and influences.
    Eval(EvalArgs),
    /// Print closed-form bounds for given parameters.
    Bounds(BoundsArgs),
    /// Exhaustive minimum-mpv search over small grids.
    Search(SearchArgs),
    /// Reference tables (rho21, n3d2) as CSV.
    Table(TableArgs),
    /// Conjectured excess threshold report for c = 2^(b n).
    Conjecture(ConjectureArgs),
    /// Run a randomized verification suite of the exact theorems.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    kind: kinds::KindArgs,
    /// Output SPART1 path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Input SPART1 file (alternative to --kind).
    #[arg(long, conflicts_with = "kind")]
    r#in: Option<PathBuf>,
    #[command(flatten)]
    kind: kinds::KindArgs,
    /// Projection dimension d.
    #[arg(long)]
    d: u32,
    /// Also compute the influence table for coalitions of this size.
    #[arg(long)]
    influence: Option<u32>,
    /// Check the exact bounds that apply to this partition.
    #[arg(long)]
    check_bounds: bool,
    #[arg(long, value_enum, default_value_t = output::Format::Human)]
    format: output::Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    c: u64,
    /// Target mpv for the d=1 iterated-ceiling cover-size bound, e.g. 2/3.
    #[arg(long)]
    eps: Option<String>,
    /// Exponent rate b in c = 2^(b n), e.g. 1/2.
    #[arg(long)]
    b: Option<String>,
    /// Conjectured excess constant delta, e.g. 1/100.
    #[arg(long)]
    delta: Option<String>,
    /// Base of the log in the conjectured excess: 2 or e.
    #[arg(long, default_value = "2")]
    log_base: String,
    #[arg(long, value_enum, default_value_t = output::Format::Human)]
    format: output::Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: u32,
    /// Grid resolution N.
    #[arg(long)]
    grid: u32,
    #[arg(long)]
    c: u8,
    #[arg(long)]
    d: u32,
    /// Enumeration budget (label vectors examined).
    #[arg(long, default_value_t = 1u64 << 30)]
    budget: u64,
    /// Disable canonical-form symmetry pruning.
    #[arg(long)]
    no_prune: bool,
    /// Search over covers (each cell in at least one part) instead of
    /// partitions; limited to n*N <= 8.
    #[arg(long)]
    covers: bool,
    /// Sample this many random partitions instead of exhausting.
    #[arg(long, conflicts_with = "covers")]
    sample: Option<u64>,
    /// Seed for --sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the best partition found as a SPART1 file.
    #[arg(long)]
    out_witness: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = output::Format::Json)]
    format: output::Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Which table: rho21 or n3d2.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1)]
    c_min: u64,
    #[arg(long, default_value_t = 15)]
    c_max: u64,
    /// Grid resolution for the n3d2 golden-ratio row.
    #[arg(long, default_value_t = 610)]
    grid: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConjectureArgs {
    /// Rate b in (0,1), e.g. 1/5.
    #[arg(long)]
    b: String,
    #[arg(long)]
    n: u32,
    /// Excess constant delta, e.g. 1/100.
    #[arg(long, default_value = "1/100")]
    delta: String,
    #[arg(long, default_value = "2")]
    log_base: String,
    /// Optional partition to compare against the threshold.
    #[arg(long)]
    r#in: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = output::Format::Json)]
    format: output::Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (influence-projection, uniform-cover, sauer-shelah,
    /// product-factorization, boolean-upper-bound) or "all".
    suite: String,
    #[arg(long, default_value_t = 500)]
    count: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => commands::construct(args),
        Command::Eval(args) => commands::eval(args),
        Command::Bounds(args) => commands::bounds(args),
        Command::Search(args) => commands::search(args),
        Command::Table(args) => commands::table(args),
        Command::Conjecture(args) => commands::conjecture(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
