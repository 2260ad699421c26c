//! Command-line front end for lasso-precise approximation.

mod commands;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_approx::Error;

pub const SOLVER_ENV: &str = "OMEGA_APPROX_SOLVER";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 usage or parse, 3 contract, 4 resource limit, 5 solver.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                Error::Input(_) | Error::Parse { .. } => 2,
                Error::Contract(_) => 3,
                Error::ResourceLimit(_) => 4,
                Error::Solver(_) | Error::Decode(_) => 5,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "omega-approx",
    version,
    about = "Lasso-precise approximations of omega-regular languages"
)]
pub struct Cli {
    /// Worker threads for lasso enumeration and brute-force search.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an n-lasso-precise under- or overapproximation.
    Approximate(ApproximateArgs),
    /// Check an automaton for n-lasso-precision against a formula or automaton.
    Check(CheckArgs),
    /// Search for a small lasso-precise automaton.
    Synthesize(SynthesizeArgs),
    /// Emit a fixture family member.
    Family(FamilyArgs),
    /// Print basic facts about an automaton.
    Info(InfoArgs),
    /// Complement a deterministic automaton.
    Complement(ComplementArgs),
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    /// LTL formula given inline.
    #[arg(long)]
    pub ltl: Option<String>,
    /// File holding an LTL formula.
    #[arg(long, value_name = "PATH")]
    pub ltl_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Under,
    Over,
}

#[derive(Args, Debug)]
pub struct ApproximateArgs {
    #[command(flatten)]
    pub formula: FormulaArgs,
    /// Input automaton in HOA format.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub bound: usize,
    /// `safety` or `parity:<m>`.
    #[arg(long, default_value = "safety")]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Direction::Under)]
    pub direction: Direction,
    /// Restrict an LTL input to these letters, separated by `;`, e.g. `{};{p}`.
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Also write a DOT graph.
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[command(flatten)]
    pub formula: FormulaArgs,
    /// Reference automaton in HOA format.
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub bound: usize,
    /// Largest lasso length for the inclusion check (default: the bound).
    #[arg(long)]
    pub inclusion_bound: Option<usize>,
    /// `over` checks `φ ⊆ L(A)` instead of `L(A) ⊆ φ`; needs a deterministic automaton.
    #[arg(long, value_enum, default_value_t = Direction::Under)]
    pub direction: Direction,
    /// Also test this many random lassos longer than the inclusion bound.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Expansion,
    External,
    Brute,
    Lazy,
}

#[derive(Args, Debug)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub formula: FormulaArgs,
    #[arg(long)]
    pub bound: usize,
    /// Number of states (the largest one tried with --minimal).
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub colors: usize,
    /// Search for the smallest state count up to --max-states.
    #[arg(long)]
    pub minimal: bool,
    #[arg(long)]
    pub max_states: Option<usize>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// External QBF solver command; `{}` is replaced by the QDIMACS path.
    #[arg(long, env = SOLVER_ENV)]
    pub solver: Option<String>,
    /// Universal assignments the expansion backend may visit.
    #[arg(long, default_value_t = omega_approx::synth::DEFAULT_EXPANSION_LIMIT)]
    pub limit: u64,
    /// Allow nondeterministic automata (experimental).
    #[arg(long)]
    pub nondeterministic: bool,
    /// Write the QBF instance in QDIMACS format.
    #[arg(long, value_name = "PATH")]
    pub emit_qbf: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write a JSON result with the verdict, k and the automaton path.
    #[arg(long, value_name = "PATH")]
    pub result: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// phi-n, gf-one, omega-k, fg-gf or intro.
    pub name: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Alphabet for phi-n: a single-digit size or the letters, e.g. `01`.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Formula number for `intro`.
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ComplementArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
