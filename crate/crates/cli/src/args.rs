use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evosoft::complexity::TokenMode;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "evosoft", version, about = "Simulations, fits and censuses for evolving software systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a network with the copying model
    #[command(args_override_self = true)]
    Grow(GrowArgs),
    /// Fit a power law to in- or out-degrees of an edge list
    #[command(args_override_self = true)]
    Degfit(DegfitArgs),
    /// Census of k-node subgraph classes
    #[command(args_override_self = true)]
    Motifs(MotifsArgs),
    /// Extract a dependency graph from a source tree
    #[command(args_override_self = true)]
    Extract(ExtractArgs),
    /// Integrate the competition equations
    #[command(args_override_self = true)]
    Compete(CompeteArgs),
    /// Run the lattice language-adoption model
    #[command(args_override_self = true)]
    Lattice(LatticeArgs),
    /// Wright-Fisher run under frequency-dependent selection
    #[command(args_override_self = true)]
    Fds(FdsArgs),
    /// Fit the discrete generalized beta law to rank-ordered values
    #[command(args_override_self = true)]
    Dgbd(DgbdArgs),
    /// Compare stretched-exponential and exponential fits of positive samples
    #[command(args_override_self = true)]
    Weibull(WeibullArgs),
    /// Block-decomposition complexity, LZ78 and lexical diversity of a file
    #[command(args_override_self = true)]
    Complexity(ComplexityArgs),
    /// Inter-event statistics of an event log
    #[command(args_override_self = true)]
    Temporal(TemporalArgs),
    /// Re-run a named experiment with pinned seeds
    #[command(args_override_self = true)]
    Repro(ReproArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Grow(_) => "grow",
            Command::Degfit(_) => "degfit",
            Command::Motifs(_) => "motifs",
            Command::Extract(_) => "extract",
            Command::Compete(_) => "compete",
            Command::Lattice(_) => "lattice",
            Command::Fds(_) => "fds",
            Command::Dgbd(_) => "dgbd",
            Command::Weibull(_) => "weibull",
            Command::Complexity(_) => "complexity",
            Command::Temporal(_) => "temporal",
            Command::Repro(_) => "repro",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory (default: runs/<command>)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file supplying flags; a manifest.json works too
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GrowArgs {
    /// Targets drawn per new node
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Probability of linking to a chosen target
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Probability of inheriting each out-link of a target
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long = "N", default_value_t = 1000)]
    #[serde(rename = "N")]
    pub n: usize,
    /// Seed chain size (default m+1)
    #[arg(long = "N0")]
    #[serde(rename = "N0")]
    pub n0: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    In,
    Out,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DegfitArgs {
    /// Edge list (`# nodes=N` header, then `src,dst` lines)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::In)]
    pub which: Which,
    /// Fixed lower cutoff; without it the cutoff is chosen by KS scan
    #[arg(long)]
    pub kmin: Option<u32>,
    /// Largest cutoff tried by the scan
    #[arg(long, default_value_t = 50)]
    pub kmin_max: u32,
    /// Smallest tail the scan accepts
    #[arg(long, default_value_t = 100)]
    pub min_tail: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MotifsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Sampled subgraphs; exact enumeration when absent
    #[arg(long)]
    pub samples: Option<usize>,
    /// Degree-preserving null graphs for z-scores
    #[arg(long, default_value_t = 0)]
    pub null: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExtractArgs {
    #[arg(long)]
    pub root: PathBuf,
    /// Built-in profile: c, import or require
    #[arg(long, default_value = "c")]
    pub profile: String,
    /// Profile definition in JSON; overrides --profile
    #[arg(long)]
    pub profile_json: Option<PathBuf>,
    /// Keep unresolved references as external nodes
    #[arg(long)]
    pub external: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CompeteArgs {
    /// Initial shares, comma separated
    #[arg(long)]
    pub rho0: String,
    /// Rates, comma separated (default all 1)
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    /// Write every n-th state
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LatticeArgs {
    #[arg(long = "L", default_value_t = 32)]
    #[serde(rename = "L")]
    pub side: usize,
    /// Languages an agent can hold
    #[arg(long, default_value_t = 1)]
    pub capacity: usize,
    #[arg(long, default_value_t = 0.0)]
    pub innovation_rate: f64,
    /// Sweeps
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub initial_languages: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FdsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long = "J", default_value_t = 2.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long = "N", default_value_t = 100)]
    #[serde(rename = "N")]
    pub n: u64,
    /// Expected innovations per generation
    #[arg(long, default_value_t = 0.1)]
    pub innovation_rate: f64,
    #[arg(long, default_value_t = 2.0)]
    pub delta_z: f64,
    #[arg(long, default_value_t = 1000)]
    pub generations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Single-mutant introductions used to estimate the fixation fraction
    #[arg(long, default_value_t = 0)]
    pub fixation_events: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DgbdArgs {
    /// Values in rank order, one per line (last CSV column is used)
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct WeibullArgs {
    /// Positive samples, one per line (last CSV column is used)
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ComplexityArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Token mode for LZ78 and type-token ratio: bytes, words or bits
    #[arg(long, default_value = "bytes")]
    pub mode: TokenMode,
    /// Block width
    #[arg(long, default_value_t = 8)]
    pub w: u32,
    /// Longest automaton run
    #[arg(long = "T", default_value_t = 8)]
    #[serde(rename = "T")]
    pub t: u32,
    /// Load a table written by an earlier run instead of building one
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Also write the line-by-symbol incidence matrix
    #[arg(long)]
    pub incidence: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    None,
    Entity,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TemporalArgs {
    /// `timestamp[,entity]` CSV
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = GroupBy::None)]
    pub group_by: GroupBy,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReproArgs {
    /// fig2a, fig2b, fig2d, dgbd-lattice, fds-punctuation, weibull-alpha or imitation-bdm
    pub name: Option<String>,
    /// Same as the positional name
    #[arg(long = "experiment")]
    pub experiment: Option<String>,
    #[command(flatten)]
    pub common: Common,
}
