mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Toric data, fan certificates and Chow rings of the quasimap moduli space
/// of P1 x P1 in bidegree (d1, d2).
#[derive(Parser, Debug)]
#[command(name = "qmt", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub d1: i64,
    #[arg(long)]
    pub d2: i64,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Node limit for cone enumeration and linear algebra.
    #[arg(long, env = "QMT_BUDGET", default_value_t = 200_000_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Weight,
    Vertex,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weight matrix, vertex matrix and primitive collections.
    Build(Common),
    /// Exactness, column identities, min-value trials and simpliciality samples.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Perturb one weight entry before checking (negative control).
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Solve the min-value system for one target vector.
    SolveAmvc {
        #[command(flatten)]
        common: Common,
        /// JSON array of r numbers or "p/q" strings.
        #[arg(long)]
        y: String,
        /// Also run the exhaustive activity-pattern oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Count cones of each dimension.
    Count {
        #[command(flatten)]
        common: Common,
        /// Largest cone dimension; defaults to floor(n/2).
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Betti numbers and Poincare polynomial.
    Poincare(Common),
    /// Chow ring presentation.
    Chow {
        #[command(flatten)]
        common: Common,
        /// Also compute graded dimensions up to this degree.
        #[arg(long)]
        graded_kmax: Option<usize>,
        /// Include a script in this dialect (macaulay2, plain).
        #[arg(long)]
        emit: Option<String>,
        /// Write the script to this file instead of embedding it.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Cone counts, Betti numbers and the graded-dimension cross-check.
    Report {
        #[command(flatten)]
        common: Common,
        /// Degrees for the graded-dimension cross-check.
        #[arg(long, default_value_t = 2)]
        kmax: usize,
    },
    /// Print one matrix.
    Emit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        what: Which,
    },
    /// Homogeneous coordinates, torus weights and excluded locus.
    Moduli(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    commands::run(cli.command)
}
