//! `chebfilter` command-line front end.
//!
//! Exit status is 0 on success, 1 when a computation rejects its inputs
//! (validation or invariant failure) and 2 for unreadable or malformed input.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chebfilter::models::{ModelKind, Regime};
use chebfilter::poly::{ApproxMethod, FilterFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chebfilter", version, about = "Chebyshev spectral filtering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximation error of polynomial bases on a target filter.
    Approx(ApproxArgs),
    /// Low, high and band impulse responses of a delta on a ring.
    RingDemo(RingArgs),
    /// Per-eigenvalue filter that maps a signal exactly onto binary labels.
    Recover(RecoverArgs),
    /// Node classification with one of the filter models.
    Train(TrainArgs),
    /// Node, edge, feature and class counts plus edge homophily.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ApproxArgs {
    /// runge, step:TAU, exp_decay:A or poly:C0,C1,...
    #[arg(long = "fn", default_value = "runge")]
    function: FilterFunction,
    #[arg(long, value_delimiter = ',', default_value = "chebyshev,lagrange,bernstein,monomial")]
    bases: Vec<ApproxMethod>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    orders: Vec<usize>,
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RingArgs {
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Eigenvalues within this distance of a target pass the impulse filter.
    #[arg(long, default_value_t = chebfilter::spectral::DEFAULT_IMPULSE_TOL)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, value_name = "PATH")]
    edges: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    features: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

impl DataArgs {
    fn paths(&self) -> Result<[&Path; 3], Failure> {
        match (&self.edges, &self.features, &self.labels) {
            (Some(e), Some(f), Some(l)) => Ok([e, f, l]),
            _ => Err(Failure::Input(
                "--edges, --features and --labels must be given together".into(),
            )),
        }
    }
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Use a ring of this many nodes with a seeded random signal instead of
    /// dataset files. Labels default to node parity.
    #[arg(long, conflicts_with_all = ["edges", "features"])]
    ring: Option<usize>,
    /// Feature column used as the input signal.
    #[arg(long, default_value_t = 0)]
    column: usize,
    #[arg(long, default_value_t = chebfilter::spectral::DEFAULT_RECOVERY_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SyntheticArg {
    Homophilic,
    Heterophilic,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Train on a generated graph instead of dataset files.
    #[arg(long, value_enum, conflicts_with_all = ["edges", "features", "labels"])]
    synthetic: Option<SyntheticArg>,
    /// Node count of the generated graph.
    #[arg(long, default_value_t = 200, requires = "synthetic")]
    n: usize,
    /// JSON model configuration; missing fields take their defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured model.
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long, default_value = "standard")]
    regime: Regime,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Overrides the configured seed. Run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs trained concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
}

/// A command failure and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Missing, unreadable or malformed input (exit 2).
    Input(String),
    /// Inputs were read but rejected by a computation (exit 1).
    Invalid(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Input(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invalid(_) => 1,
        }
    }
}

impl From<chebfilter::Error> for Failure {
    fn from(e: chebfilter::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) | Failure::Invalid(m) => f.write_str(m),
        }
    }
}

/// Sizes the global pool from `CHEBFILTER_THREADS` (default 1).
fn configure_threads() -> Result<(), Failure> {
    let threads = match std::env::var("CHEBFILTER_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure::Input(format!("CHEBFILTER_THREADS must be a positive integer, got {v:?}")))?,
        Err(_) => 1,
    };
    #[cfg(feature = "parallel")]
    {
        // a second initialization only happens in tests; keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Approx(a) => commands::approx(&a.function, &a.bases, &a.orders, a.grid, &a.out),
        Command::RingDemo(a) => commands::ring_demo(a.n, a.tol, &a.out),
        Command::Recover(a) => {
            let source = match a.ring {
                Some(n) => commands::RecoverSource::Ring {
                    n,
                    labels: a.data.labels.as_deref(),
                    seed: a.seed,
                },
                None => commands::RecoverSource::Files {
                    paths: a.data.paths()?,
                    column: a.column,
                },
            };
            commands::recover(source, a.eps, &a.out)
        }
        Command::Train(a) => {
            let data = match a.synthetic {
                Some(kind) => commands::TrainData::Synthetic {
                    kind: match kind {
                        SyntheticArg::Homophilic => chebfilter::graph::SyntheticKind::Homophilic,
                        SyntheticArg::Heterophilic => chebfilter::graph::SyntheticKind::Heterophilic,
                    },
                    n: a.n,
                },
                None => commands::TrainData::Files(a.data.paths()?),
            };
            commands::train(commands::TrainRequest {
                data,
                config: a.config.as_deref(),
                model: a.model,
                regime: a.regime,
                runs: a.runs,
                seed: a.seed,
                jobs: a.jobs,
                out: &a.out,
            })
        }
        Command::Stats(a) => commands::stats(a.data.paths()?, &a.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
