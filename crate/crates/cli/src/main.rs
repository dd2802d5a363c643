//! `localsim` command-line driver.
//!
//! Exit codes: 0 success, 1 input/output or other failure, 2 usage error,
//! 3 a with-high-probability event ended the run, 4 a verifier found
//! violations. Errors are printed to stderr as
//! `{"error":{"kind":..,"message":..}}`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "localsim", version, about = "Simulate constant-round LOCAL algorithms for coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph in the plain-text graph format.
    Generate(GenerateArgs),
    /// Run one procedure on a graph; verifiers run automatically.
    Run(RunArgs),
    /// Check a coloring or a decomposition against a graph.
    Verify(VerifyArgs),
    /// Repeat a seeded experiment and summarize it.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Read the graph from a file.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Erdos-Renyi G(n, p).
    #[arg(long, num_args = 2, value_names = ["N", "P"])]
    gnp: Option<Vec<String>>,
    /// Random d-regular graph (close to regular when n*d is odd).
    #[arg(long, num_args = 2, value_names = ["N", "DEGREE"])]
    regular: Option<Vec<String>>,
    /// Two cliques joined by a path.
    #[arg(long, num_args = 3, value_names = ["K1", "K2", "LEN"])]
    clique_path: Option<Vec<String>>,
    /// rows x cols grid.
    #[arg(long, num_args = 2, value_names = ["ROWS", "COLS"])]
    grid: Option<Vec<String>>,
}

/// Seed shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct SeedArg {
    #[arg(long, env = "LOCALSIM_SEED", default_value_t = 0)]
    seed: u64,
}

/// Pipeline parameters; unset ones are derived from `epsilon`.
#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    mu: Option<f64>,
    /// Constant in the G(B) degree threshold.
    #[arg(long)]
    k_degree: Option<f64>,
    /// Rounds the bounded-degree coloring may use.
    #[arg(long)]
    round_budget: Option<usize>,
    /// Iterations the dominating-set labeling may use.
    #[arg(long)]
    iter_budget: Option<usize>,
    /// Largest cluster colored exactly.
    #[arg(long)]
    cluster_cap: Option<usize>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    seed: SeedArg,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Add the wall-clock time to the embedded config.
    #[arg(long)]
    timestamp: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Procedure {
    Partition,
    Color,
    Dominate,
    Approximate,
    Pipeline,
    CollectTopology,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, value_enum)]
    procedure: Procedure,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    params: ParamArgs,
    /// Label file with the decomposition for `approximate`.
    #[arg(long, value_name = "PATH")]
    decomposition: Option<PathBuf>,
    /// Claimed cluster diameter of `--decomposition`.
    #[arg(long)]
    d: Option<usize>,
    /// Claimed label count of `--decomposition`; defaults to its largest label.
    #[arg(long)]
    c: Option<u64>,
    /// Radius for `collect-topology`.
    #[arg(long, default_value_t = 1)]
    radius: usize,
    /// JSON trace with config, result and verifier reports.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Label file with the resulting coloring or labeling.
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
    /// DOT export of the resulting labels.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args, Debug)]
#[group(id = "target", required = true, multiple = false, args = ["coloring", "decomposition"])]
struct VerifyArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_name = "PATH")]
    coloring: Option<PathBuf>,
    #[arg(long, value_name = "PATH", requires = "d")]
    decomposition: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    c: Option<u64>,
    /// Measure cluster diameter in the whole graph instead of the cluster.
    #[arg(long)]
    weak: bool,
    /// JSON verifier report.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment name, e.g. partition-dominating-size.
    #[arg(long)]
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Degree for color-termination.
    #[arg(long)]
    degree: Option<usize>,
    /// Round limit for color-termination.
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Overrides the experiment's epsilon when given.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    k_degree: Option<f64>,
    #[arg(long)]
    round_budget: Option<usize>,
    #[arg(long)]
    iter_budget: Option<usize>,
    #[arg(long)]
    cluster_cap: Option<usize>,
    /// Per-trial CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Full JSON summary.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    #[arg(long)]
    timestamp: bool,
}

/// Failure of a subcommand, classified for the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// Bad input data or an algorithm precondition.
    #[error("{message}")]
    Input { kind: &'static str, message: String },
    #[error("{message}")]
    Whp { kind: &'static str, message: String },
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Input { kind, .. } | CliError::Whp { kind, .. } => kind,
            CliError::Verification(_) => "verification_failed",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Input { .. } => 1,
            CliError::Whp { .. } => 3,
            CliError::Verification(_) => 4,
        }
    }
}

fn report_error(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error(&CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Run(a) => commands::run(a),
        Command::Verify(a) => commands::verify(a),
        Command::Experiment(a) => commands::experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
