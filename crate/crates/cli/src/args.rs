use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "grover4d",
    version,
    about = "Grover search with arbitrary initial states"
)]
pub struct Cli {
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step the full state vector and record P_s, bounds and mean amplitudes.
    Simulate(TraceArgs),
    /// The same trace evaluated from closed forms.
    ClosedForm(TraceArgs),
    /// Run both engines side by side and report their residuals.
    Compare(CompareArgs),
    /// Average the success probability over marked sets of size r.
    Average(AverageArgs),
    /// Evolve a mixed ensemble.
    Mixed(MixedArgs),
    /// Joint search versus search on Alice's reduced state.
    Bipartite(BipartiteArgs),
    /// Maximal success of a pseudo-pure state.
    PseudoPure(PseudoPureArgs),
    /// Classify a state as single-marked, in-plane, perpendicular or generic.
    Classify(ClassifyArgs),
    /// Print floor((π/4)·sqrt(N/r)).
    OptimalTau(TauArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AverageMethodArg {
    Enumeration,
    MonteCarlo,
    Closed,
}

#[derive(Debug, Args)]
pub struct StateSource {
    /// State file: {"n": int, "amplitudes": [[re, im], ...]}.
    #[arg(long, value_name = "PATH", conflicts_with = "uniform")]
    pub state: Option<PathBuf>,

    /// Use the equal superposition on this many qubits instead of a file.
    #[arg(long, value_name = "N_QUBITS")]
    pub uniform: Option<u32>,
}

#[derive(Debug, Args)]
pub struct MarkedSource {
    /// Marked indices, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "INDICES")]
    pub marked: Option<Vec<usize>>,

    /// Marked-set file: {"indices": [int, ...]}.
    #[arg(long, value_name = "PATH")]
    pub marked_file: Option<PathBuf>,

    /// Sample a marked set of this size.
    #[arg(long = "r", value_name = "R")]
    pub r: Option<usize>,

    /// Seed for the sampled marked set.
    #[arg(long, value_name = "SEED", requires = "r")]
    pub marked_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub state: StateSource,
    #[command(flatten)]
    pub marked: MarkedSource,
    /// Last iteration to record; defaults to the optimal iteration count.
    #[arg(long)]
    pub t_max: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub trace: TraceArgs,
    /// Exit with status 2 if the engines disagree beyond tolerance.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    #[command(flatten)]
    pub state: StateSource,
    /// Size of the marked sets averaged over.
    #[arg(long = "r", value_name = "R")]
    pub r: usize,
    #[arg(long)]
    pub t_max: Option<u64>,
    /// Defaults to monte-carlo when --samples is given, enumeration otherwise.
    #[arg(long, value_enum)]
    pub method: Option<AverageMethodArg>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MixedArgs {
    /// Ensemble file: {"n": int, "members": [{"p": real, "amplitudes": [...]}, ...]}.
    #[arg(long, value_name = "PATH")]
    pub state: PathBuf,
    #[command(flatten)]
    pub marked: MarkedSource,
    #[arg(long)]
    pub t_max: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BipartiteArgs {
    /// Bipartite file {"n_alice", "k_bob", "amplitudes"} in Bob-major order,
    /// or a plain state file split with --n-alice/--k-bob.
    #[arg(long, value_name = "PATH")]
    pub state: PathBuf,
    #[arg(long)]
    pub n_alice: Option<u32>,
    #[arg(long)]
    pub k_bob: Option<u32>,
    /// Number of marked states on Alice's side.
    #[arg(long = "r", default_value_t = 1)]
    pub r: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PseudoPureArgs {
    #[command(flatten)]
    pub state: StateSource,
    #[arg(long)]
    pub epsilon: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub state: StateSource,
    #[command(flatten)]
    pub marked: MarkedSource,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Number of qubits.
    #[arg(long)]
    pub n: u32,
    #[arg(long = "r", default_value_t = 1)]
    pub r: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
