use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpcore::linalg::KernelPath;
use mpcore::PrecisionTag;

#[derive(Debug, Parser)]
#[command(name = "mpcore", version, about = "Generate, solve and benchmark ill-conditioned dense systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write A, b and x_true for a generated system.
    Gen(GenArgs),
    /// LU solve in a multi-component precision.
    Direct(DirectArgs),
    /// Mixed-precision iterative refinement.
    Refine(RefineArgs),
    /// Direct and refinement rows for several precisions plus a BigFloat direct baseline.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Prec {
    Dd,
    Td,
    Qd,
}

impl Prec {
    pub fn tag(self) -> PrecisionTag {
        match self {
            Prec::Dd => PrecisionTag::DD,
            Prec::Td => PrecisionTag::TD,
            Prec::Qd => PrecisionTag::QD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

impl Toggle {
    /// `MPCORE_SIMD=off` wins over `on`.
    pub fn kernel_path(self) -> KernelPath {
        match self {
            Toggle::On => KernelPath::resolve(KernelPath::Lanes),
            Toggle::Off => KernelPath::Scalar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_n(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a dimension"))?;
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    Ok(n)
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("'{s}' must be a positive integer")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, default_value_t = 200, value_parser = parse_n)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Condition exponent c of the diagonal 1 .. 10^-c.
    #[arg(long = "cond", default_value_t = 26)]
    pub cond_exponent: u32,
    /// Working precision of the generator.
    #[arg(long, default_value_t = 512)]
    pub gen_bits: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Directory written by `gen`; when absent the system is generated.
    #[arg(long)]
    pub sys: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RefineFlags {
    #[arg(long, default_value = "1e-100")]
    pub rtol: String,
    #[arg(long, default_value = "0")]
    pub atol: String,
    #[arg(long, default_value_t = 50, value_parser = parse_positive)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Precision of the written files.
    #[arg(long, default_value_t = 424)]
    pub long_bits: u32,
    #[arg(long, default_value = "sys")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DirectArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Prec::Dd)]
    pub prec: Prec,
    /// Precision used for the generated system and for Max.RE.
    #[arg(long, default_value_t = 424)]
    pub long_bits: u32,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub simd: Toggle,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Prec::Dd)]
    pub prec: Prec,
    #[arg(long, default_value_t = 424)]
    pub long_bits: u32,
    #[command(flatten)]
    pub refine: RefineFlags,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub simd: Toggle,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dd,td,qd")]
    pub precs: Vec<Prec>,
    #[arg(long, default_value_t = 424)]
    pub long_bits: u32,
    #[command(flatten)]
    pub refine: RefineFlags,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub simd: Toggle,
    /// Worker threads for independent rows; each row runs single-threaded.
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
