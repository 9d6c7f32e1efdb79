use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsp_core::{Category, UpperBound};

#[derive(Debug, Parser)]
#[command(name = "qsp", version, about = "Quadratic set covering and packing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance stored in the native format.
    Solve(SolveArgs),
    /// Generate a random covering instance.
    Gen(GenArgs),
    /// Convert an OR-Library or DIMACS file to the native format.
    Convert(ConvertArgs),
    /// Check every claim attached to the embedded counterexamples.
    VerifyPaper(VerifyArgs),
    /// Time-matched comparison of the heuristic against branch-and-bound.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Sa,
    Bb,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relaxation {
    /// x >= 0, as the method is stated.
    Unbounded,
    /// 0 <= x <= 1.
    Box,
}

impl Relaxation {
    pub fn upper(self) -> UpperBound {
        match self {
            Self::Unbounded => UpperBound::Infinite,
            Self::Box => UpperBound::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CategoryArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<CategoryArg> for Category {
    fn from(c: CategoryArg) -> Self {
        match c {
            CategoryArg::One => Category::PsdMixedSign,
            CategoryArg::Two => Category::PsdNonnegative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceFormat {
    Orlib,
    Dimacs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "sa")]
    pub algo: Algo,
    /// `all-ones`, `greedy`, or a file of whitespace-separated numbers
    /// (fractions like 1/2 allowed). Heuristic only.
    #[arg(long)]
    pub x0: Option<String>,
    /// Seconds; branch-and-bound only.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Bounds of the heuristic's linear subproblems.
    #[arg(long, value_enum, default_value = "unbounded")]
    pub relaxation: Relaxation,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    #[arg(long, value_enum)]
    pub category: CategoryArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub from: SourceFormat,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Replace the linear costs by generated quadratic ones.
    #[arg(long)]
    pub attach_quad: bool,
    #[arg(long, value_enum, requires = "attach_quad", default_value = "2")]
    pub category: CategoryArg,
    #[arg(long, requires = "attach_quad", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Perturbs one counterexample before checking (fault injection).
    #[arg(long, hide = true)]
    pub tamper: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    /// Cost family attached to instances stored without quadratic costs.
    #[arg(long, value_enum)]
    pub category: CategoryArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a markdown table here.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "unbounded")]
    pub relaxation: Relaxation,
}
