//! `grassdyn`: operator construction, structure bounds, basis reduction and
//! orbit-density experiments from the command line.
//!
//! Every command writes one JSON report. Exit status is 0 when all verdicts
//! pass, 1 when a verdict fails, 2 on bad input and 3 on internal errors.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema 1)");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<grassdyn::Error> for CliError {
    fn from(e: grassdyn::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "grassdyn", version = LONG_VERSION, about = "Subspace orbit experiments for operators on R^N")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Run per-target work on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Recover the block structure of an operator.
    Jordan(JordanArgs),
    /// Relative size and lower bounds of an operator or structure.
    Bounds(BoundsArgs),
    /// Staircase reduction of a basis against a block structure.
    Reduce(ReduceArgs),
    /// Exact coefficients of the Delta polynomials.
    Delta(DeltaArgs),
    /// Distance from the orbit of a subspace to target points.
    Density(DensityArgs),
    /// Distance from the subspace orbit to target subspaces on the Grassmannian.
    GrassDensity(GrassDensityArgs),
    /// First iterate k with k*angles close to the phases modulo 2pi.
    Kronecker(KroneckerArgs),
    /// Compare complements of the forward orbit with the orbit of the dual operator.
    Duality(DualityArgs),
    /// Structural orbit invariants.
    Invariants(InvariantsArgs),
    /// Bundled multi-step experiments with pinned seeds.
    Recipe(RecipeArgs),
}

/// Where the operator comes from.
#[derive(Debug, Args, Serialize)]
pub struct OperatorSource {
    /// Operator matrix, JSON array of rows or CSV.
    #[arg(long = "op", visible_alias = "in", value_name = "FILE", conflicts_with = "example")]
    pub op: Option<PathBuf>,
    /// Block-diagonal rotation operator with these angles, e.g. `1,1.41421356`.
    #[arg(long, value_name = "ANGLES", allow_hyphen_values = true)]
    pub example: Option<String>,
    /// Append a trailing 1x1 identity block to the example operator.
    #[arg(long, requires = "example")]
    pub odd: bool,
}

/// Where the subspace comes from.
#[derive(Debug, Args, Serialize)]
pub struct SubspaceSource {
    /// Spanning vectors, JSON array of arrays or CSV with one vector per line.
    #[arg(long, value_name = "FILE", conflicts_with = "axes")]
    pub subspace: Option<PathBuf>,
    /// Coordinate subspace spanned by these 1-based axes, e.g. `1,3`.
    #[arg(long, value_name = "I,J")]
    pub axes: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct JordanArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    /// Rank and eigenvalue tolerance of the recovery.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    /// Block structure: a JSON array of blocks or a full structure object.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["op", "example"])]
    pub structure: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    /// Block structure: a JSON array of blocks or a full structure object.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["op", "example"])]
    pub structure: Option<PathBuf>,
    /// Basis vectors, JSON array of arrays or CSV.
    #[arg(long, value_name = "FILE")]
    pub basis: PathBuf,
    #[arg(long, default_value_t = grassdyn::reduction::DEFAULT_REDUCTION_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DeltaArgs {
    #[arg(long)]
    pub n: usize,
    /// Evaluate the polynomial at this integer.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// Number of seeded random targets.
    #[arg(long, value_name = "COUNT", conflicts_with = "target_file")]
    pub targets: Option<usize>,
    /// Explicit targets instead of random ones.
    #[arg(long, value_name = "FILE")]
    pub target_file: Option<PathBuf>,
    /// Iterate budget.
    #[arg(long = "K", default_value_t = grassdyn::orbit::DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Hits required to pass. Defaults to every target.
    #[arg(long)]
    pub min_hits: Option<usize>,
    /// Also write record-improvement traces as CSV (target, k, distance).
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    #[command(flatten)]
    pub subspace: SubspaceSource,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[arg(long, default_value_t = grassdyn::orbit::DEFAULT_POINT_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GrassDensityArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    #[command(flatten)]
    pub subspace: SubspaceSource,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[arg(long, default_value_t = grassdyn::orbit::DEFAULT_GRASS_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct KroneckerArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub angles: String,
    #[arg(long, allow_hyphen_values = true)]
    pub phases: String,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long = "K", default_value_t = 10_000_000)]
    pub k: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DualityArgs {
    #[command(flatten)]
    pub operator: OperatorSource,
    #[command(flatten)]
    pub subspace: SubspaceSource,
    #[arg(long, default_value_t = 200)]
    pub imax: usize,
    /// Largest chordal residual that still passes.
    #[arg(long, default_value_t = 1e-8)]
    pub max_residual: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct InvariantsArgs {
    #[command(subcommand)]
    pub check: InvariantCheck,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantCheck {
    /// Projection rank lock of T^k(M) onto the first coordinate plane of R^4.
    Lock {
        #[command(flatten)]
        operator: OperatorSource,
        #[command(flatten)]
        subspace: SubspaceSource,
        #[arg(long = "K", default_value_t = 10_000)]
        k: usize,
    },
    /// Fixed block-norm ratios along the orbit of a vector.
    NormRatio {
        #[command(flatten)]
        operator: OperatorSource,
        /// Starting vector, e.g. `1,0,1,0`.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long = "K", default_value_t = 10_000)]
        k: usize,
    },
    /// Whether a 2-plane of R^4 meets both coordinate planes in a line.
    Membership {
        #[command(flatten)]
        subspace: SubspaceSource,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct RecipeArgs {
    /// Recipe name; see `--list`.
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    /// Print the recipe names and their pinned seeds.
    #[arg(long)]
    pub list: bool,
    /// Override the pinned seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GRASSDYN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("GRASSDYN_THREADS: '{raw}' is not a thread count")))?;
    grassdyn::par::configure_threads(n).map_err(|e| CliError::Input(format!("GRASSDYN_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| {
        threads_from_env()?;
        commands::run(&cli)
    });
    match outcome {
        Ok(Ok(passed)) => ExitCode::from(if passed { 0 } else { 1 }),
        Ok(Err(e @ CliError::Input(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Ok(Err(e @ CliError::Internal(_))) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}
