//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oblivio_core::graph::DEFAULT_VERTEX_LIMIT;
use oblivio_core::num::parse_rational;
use oblivio_core::selector::DEFAULT_MAX_RETRIES;
use oblivio_core::sim::Policy;
use oblivio_core::traffic::DEFAULT_INTENSITY;
use oblivio_core::Rational;

use crate::report::OutputFormat;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OBLIVIO_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "oblivio",
    version,
    about = "Packet-oblivious transmission schedules for multi-hop radio networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the conflict graph of a network with its degree statistics.
    ConflictGraph {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        output: FormatArg,
    },
    /// Color the conflict graph of a network.
    Color(ColorArgs),
    /// Construct a universally strong selector.
    BuildSelector(BuildSelectorArgs),
    /// Check a selector file by exhaustive enumeration or sampling.
    VerifySelector(VerifySelectorArgs),
    /// Derive a transmission schedule from a selector or a coloring.
    Schedule(ScheduleArgs),
    /// Generate networks and injection traces.
    Scenario {
        #[command(subcommand)]
        kind: ScenarioCommand,
    },
    /// Check a trace against a (rho, b) adversary; exits with 2 on violation.
    ValidateTrace(ValidateTraceArgs),
    /// Run the simulator on a schedule and a trace.
    Simulate(SimulateArgs),
    /// Evaluate stability thresholds and latency bounds.
    Bounds {
        #[command(subcommand)]
        kind: BoundsCommand,
    },
    /// Run the whole pipeline and write every artifact to a directory.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct FormatArg {
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorMethod {
    /// Smallest available color in link order.
    Greedy,
    /// Minimum coloring by branch and bound.
    Exact,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "greedy")]
    pub method: ColorMethod,
    /// Largest conflict graph the exact method accepts.
    #[arg(long, default_value_t = DEFAULT_VERTEX_LIMIT)]
    pub vertex_limit: usize,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorMethod {
    /// Polynomials over a prime field.
    Poly,
    /// Independent random rows, verified before use.
    Random,
}

#[derive(Debug, Args)]
pub struct BuildSelectorArgs {
    #[arg(long, value_enum)]
    pub method: SelectorMethod,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Field-size multiplier of the polynomial construction.
    #[arg(long, default_value_t = 2)]
    pub c: usize,
    /// Target guarantee of the random construction (`1/e`, `p/q` or decimal).
    #[arg(long, default_value = "1/e", value_parser = parse_real)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    pub max_retries: usize,
    /// Selector file to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Args)]
pub struct VerifySelectorArgs {
    #[arg(long)]
    pub selector: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Check the (n, k, m)-selector property.
    #[arg(long, conflicts_with = "eps")]
    pub m: Option<usize>,
    /// Check the universally strong guarantee `eps` (defaults to the claim in
    /// the file).
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Option<Rational>,
    /// Test this many random (subset, element) pairs instead of enumerating.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleSource {
    Selector,
    Coloring,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, value_enum)]
    pub from: ScheduleSource,
    #[arg(long)]
    pub graph: PathBuf,
    /// Selector file; a polynomial selector sized for the network is built
    /// when absent.
    #[arg(long)]
    pub selector: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "greedy")]
    pub method: ColorMethod,
    /// Grow every color class to a maximal independent set.
    #[arg(long)]
    pub maximal: bool,
    /// Upper bound on the number of links, used instead of the topology.
    #[arg(long, requires = "max_degree")]
    pub max_links: Option<usize>,
    /// Upper bound on the node degree, used instead of the topology.
    #[arg(long, requires = "max_links")]
    pub max_degree: Option<usize>,
    /// Full-backlog windows simulated to verify the claimed frequency
    /// (0 skips the check).
    #[arg(long, default_value_t = 2)]
    pub verify_windows: usize,
    /// Schedule file to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCommand {
    /// Clique fed one packet per link every chi rounds plus every ceil(1/eps).
    Clique {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_rational_arg)]
        eps: Rational,
        #[arg(long)]
        horizon: u64,
        #[arg(long, env = OUT_DIR_ENV, default_value = "oblivio-out")]
        out_dir: PathBuf,
        #[command(flatten)]
        output: FormatArg,
    },
    /// The depth-2 tree family with its shared-link trace.
    TreeFamily {
        #[arg(long)]
        delta: u32,
        #[arg(long, value_parser = parse_rational_arg)]
        rho: Rational,
        #[arg(long)]
        horizon: u64,
        #[arg(long, env = OUT_DIR_ENV, default_value = "oblivio-out")]
        out_dir: PathBuf,
        #[command(flatten)]
        output: FormatArg,
    },
    /// Random (rho, b)-admissible traffic over the simple routes of a network.
    LeakyBucket {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = parse_rational_arg)]
        rho: Rational,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        max_route_len: usize,
        /// Probability of using each admissible injection opportunity.
        #[arg(long, default_value_t = DEFAULT_INTENSITY)]
        intensity: f64,
        /// Trace file to write; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random symmetric network with a degree cap.
    RandomNetwork {
        #[arg(long)]
        nodes: u32,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Graph file to write; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ValidateTraceArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, value_parser = parse_rational_arg)]
    pub rho: Rational,
    #[arg(long)]
    pub b: u64,
    /// Also check that every route is a path of this network.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, value_parser = parse_policy)]
    pub policy: Policy,
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub rounds: u64,
    /// Per-round CSV: round, total_backlog, delivered_cum, max_queue.
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    /// Per-round log of link activity.
    #[arg(long)]
    pub log_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UssFormArg {
    /// eps / (delta + 1) for a given eps.
    Direct,
    /// 1 / (4 (delta + 1) ceil(log_{delta+1} m)).
    Poly,
    /// 1 / (e (delta + 1)).
    Random,
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Stability threshold of selector-based schedules.
    Uss {
        #[arg(long)]
        delta: usize,
        #[arg(long, value_enum, default_value = "direct")]
        form: UssFormArg,
        #[arg(long, value_parser = parse_rational_arg, required_if_eq("form", "direct"))]
        eps: Option<Rational>,
        #[arg(long, required_if_eq("form", "poly"))]
        m: Option<u64>,
        #[command(flatten)]
        output: FormatArg,
    },
    /// Stability threshold of coloring-based schedules.
    Coloring {
        #[arg(long)]
        chi: usize,
        #[command(flatten)]
        output: FormatArg,
    },
    /// Active-class and delivery bounds for a (rho', T)-frequent schedule.
    Latency {
        #[arg(long, value_parser = parse_rational_arg)]
        rho: Rational,
        #[arg(long, value_parser = parse_rational_arg)]
        rho_prime: Rational,
        #[arg(long)]
        window: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        max_route_len: u32,
        #[command(flatten)]
        output: FormatArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentMethod {
    UssPoly,
    UssRandom,
    Coloring,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub method: ExperimentMethod,
    /// Queueing policy; a comma-separated list with --sweep.
    #[arg(long, value_parser = parse_policy, value_delimiter = ',', default_value = "lis")]
    pub policy: Vec<Policy>,
    /// Injection rate; a comma-separated list with --sweep.
    #[arg(long, value_parser = parse_rational_arg, value_delimiter = ',')]
    pub rho: Vec<Rational>,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replay this trace instead of generating leaky-bucket traffic.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub max_route_len: usize,
    #[arg(long, default_value_t = DEFAULT_INTENSITY)]
    pub intensity: f64,
    /// Upper bound on the number of links, used instead of the topology when
    /// sizing selectors.
    #[arg(long, requires = "max_degree")]
    pub max_links: Option<usize>,
    /// Upper bound on the node degree, used instead of the topology when
    /// sizing selectors.
    #[arg(long, requires = "max_links")]
    pub max_degree: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "oblivio-out")]
    pub out_dir: PathBuf,
    /// Run every (rho, policy) combination, each in its own subdirectory.
    #[arg(long)]
    pub sweep: bool,
    /// Worker threads for --sweep (defaults to the available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: FormatArg,
}

pub fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

pub fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: oblivio_core::Error| e.to_string())
}

/// A real number as `p/q` or a decimal. The names `e` and `1/e` are accepted too.
pub fn parse_real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "e" => Ok(std::f64::consts::E),
        "1/e" => Ok(1.0 / std::f64::consts::E),
        other => match parse_rational(other) {
            Ok(r) => Ok(*r.numer() as f64 / *r.denom() as f64),
            Err(_) => other.parse().map_err(|_| format!("`{s}` is not a number")),
        },
    }
}
