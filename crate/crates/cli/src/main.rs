//! `contact`: graphs, simulations, reduced chains, bounds and experiments.
//!
//! Exit status is 0 on success, 1 for usage errors and invalid values,
//! 2 when a computation fails. Errors go to standard error as one JSON line.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "contact", version, about = "Contact process on stars, trees and random graphs")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph as an edge list.
    Gen(GenArgs),
    /// Largest adjacency eigenvalue of a graph.
    Eig(EigArgs),
    /// Run the contact process and print one record per replica.
    Simulate(SimulateArgs),
    /// Reduced leaf chain: drift, hitting and return probabilities.
    Chain(ChainArgs),
    /// Evaluate a closed-form bound.
    Bounds(BoundsArgs),
    /// Upper bounds on the tree critical rates over a grid of p.
    Curve(CurveArgs),
    /// Density exponents over a grid of tail exponents.
    Exponents(ExponentsArgs),
    /// Run a named experiment; unknown `--key value` pairs are config keys.
    Experiment(ExperimentArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Star,
    StarChain,
    Path,
    Complete,
    Cycle,
    Config,
    Gw,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    #[arg(long, value_enum)]
    graph: Option<GraphKind>,
    /// Read the graph from an edge-list file instead.
    #[arg(long, conflicts_with = "graph")]
    input: Option<PathBuf>,
    /// Star leaves.
    #[arg(long)]
    k: Option<usize>,
    /// Path length or chain length.
    #[arg(long)]
    r: Option<usize>,
    /// Vertex count.
    #[arg(long)]
    n: Option<usize>,
    /// Degree law, e.g. `geom:p=0.5`, `plaw:a=2.5`, `sexp:b=2`, `det:d=3`.
    #[arg(long)]
    dist: Option<String>,
    /// Offspring law for `gw` (`sgeom:p=` or any degree law).
    #[arg(long)]
    offspring: Option<String>,
    /// Vertex budget for `gw`.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; `-` or absent for standard output.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct EigArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    lambda: f64,
    /// Initially infected vertices: `all` or a comma list (default `0`).
    #[arg(long, default_value = "0")]
    init: String,
    /// Use the reduced star chain (needs `--graph star`).
    #[arg(long)]
    reduced: bool,
    /// Reduced start `i,j`: infected leaves, centre state (default `0,1`).
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Stop when this vertex becomes infected.
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    at_least: Option<usize>,
    #[arg(long)]
    at_most: Option<usize>,
    #[arg(long)]
    leaves_at_least: Option<usize>,
    #[arg(long)]
    leaves_at_most: Option<usize>,
    #[arg(long, default_value_t = 1)]
    replicas: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the infected count on this time grid for replica 0 instead.
    #[arg(long)]
    trajectory: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ChainTask {
    /// Drift of exp(theta* Y) at every interior height.
    Drift,
    /// Hitting probability of `b` before the cap from `a`.
    Hitting,
    /// Dip to `b` before returning to the cap.
    Return,
    /// Smallest k with non-positive drift.
    MinK,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ChainModeArg {
    Fixed,
    Small,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long, value_enum)]
    task: ChainTask,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "fixed")]
    mode: ChainModeArg,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Upper absorbing level (default floor(L)).
    #[arg(long)]
    l: Option<usize>,
    /// Monte Carlo replicas; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    reps: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Lemma {
    Exit,
    Return,
    Life,
    Ignite,
    Good,
    Survub,
    Transfer,
    Infect,
    Gamma,
    Suff,
    Lambda2,
    Life2,
    Ignite2,
    Push,
    Schedule,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    lemma: Lemma,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Ratio r/k for `gamma`.
    #[arg(long)]
    ratio: Option<f64>,
    /// Ignition level exponent, `1/3` or `2/3`.
    #[arg(long)]
    level: Option<String>,
    /// Schedule family, e.g. `powerlaw:a=2.5,eta=0.2`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long, default_value_t = 0.01)]
    p_min: f64,
    #[arg(long, default_value_t = 0.99)]
    p_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct ExponentsArgs {
    #[arg(long, default_value_t = 2.05)]
    alpha_min: f64,
    #[arg(long, default_value_t = 4.5)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
    /// Experiment id (optional when the config file names it), then config
    /// keys as `--key value` pairs.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "ID [--KEY VALUE]")]
    rest: Vec<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Eig(a) => commands::eig(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Chain(a) => commands::chain(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Curve(a) => commands::curve(a),
        Command::Exponents(a) => commands::exponents(a),
        Command::Experiment(a) => commands::experiment(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(std::io::stderr(), "{line}");
            ExitCode::from(e.exit_code())
        }
    }
}
