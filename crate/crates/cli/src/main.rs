//! `chromfn`: compute chromatic-type graph functions and check their identities.
//!
//! Exit status: 0 success, 1 a checked identity failed, 2 bad input,
//! 3 a work cap was exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chromatic_core::{Error, Limits};

#[derive(Parser, Debug)]
#[command(name = "chromfn", version, about = "Exact (r,q)-chromatic functions, U-polynomials and Potts identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Seed for the random part of the corpus.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Maximum number of states in a state sum.
    #[arg(long, global = true, default_value_t = 1 << 22, value_parser = positive)]
    pub cap_states: u64,

    /// Maximum number of edge subsets in a subset sum.
    #[arg(long, global = true, default_value_t = 1 << 22, value_parser = positive)]
    pub cap_subsets: u64,

    /// Write the report here instead of stdout (`--report` is accepted too).
    #[arg(long, global = true, visible_alias = "report")]
    pub out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("cap must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl Cli {
    pub fn limits(&self) -> Limits {
        Limits { max_states: self.cap_states, max_subsets: self.cap_subsets }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one function on one graph.
    Compute(ComputeArgs),
    /// Check one identity on a graph or on the corpus.
    Verify(VerifyArgs),
    /// Rank of the monomial matrix M(n) against p(n).
    PartitionRank(RankArgs),
    /// p(n) against (n^3 + n + 2)/2 for n = 1..=max.
    ThresholdScan(ScanArgs),
    /// Every identity over the corpus, plus the partition checks.
    CorpusCheck(CorpusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    /// M^w_{r,q}(G; k)
    M,
    /// B^w_{r,q}(G; x, k)
    B,
    /// M_q(G; k)
    Mq,
    /// B_q(G, x, k)
    Bq,
    /// U-polynomial
    U,
    /// truncated XB coefficients
    Xb,
    /// B_{r,q}(G; t-1, k) with r, q formal
    BrqTable,
    /// Potts partition function (needs --field)
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Statesum,
    Subset,
    Delcon,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub function: Function,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "2")]
    pub r: String,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value = "1")]
    pub x: String,
    #[arg(long, value_enum, default_value_t = Algorithm::Subset)]
    pub algorithm: Algorithm,
    /// Potts field JSON for `--function z`.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CorpusOpts {
    /// Largest vertex count in the enumerated corpus.
    #[arg(long, default_value_t = 5)]
    pub max_vertices: usize,
    /// Largest edge count in the enumerated corpus.
    #[arg(long, default_value_t = 8)]
    pub max_edges: usize,
    /// Number of seeded random weighted graphs added to the corpus.
    #[arg(long, default_value_t = 200)]
    pub random: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// prop2 | prop3 | prop4 | lemma5 | lemma6 | eq1 | eq2 | thm7 | u-subst
    #[arg(long)]
    pub identity: String,
    /// Single graph; the corpus is used when absent.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// `default`, `quick` or lists such as `r=2,3/2;q=1,2;k=1,2,3;x=1,7/3`.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[command(flatten)]
    pub corpus: CorpusOpts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Modular,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Also search for a rational dependency among all s(tau) and verify it.
    #[arg(long)]
    pub dependency: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 60)]
    pub max: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[command(flatten)]
    pub corpus: CorpusOpts,
    /// Largest n for the partition checks.
    #[arg(long, default_value_t = 8)]
    pub n: u32,
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Ok,
    AssertionFailed,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: could not start {w} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AssertionFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
