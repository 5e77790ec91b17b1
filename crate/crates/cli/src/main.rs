//! `qframe`: command-line front end for the reference-frame toolkit.

mod commands;
mod probs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_NONCONVERGENCE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "qframe", version, about = "Reference-frame alignment numerics for U(1) and Z_M")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// `u1` or `zM` (e.g. `z4`).
    #[arg(long)]
    pub group: Option<String>,
    /// Comma-separated probabilities; fractions like `13/64` are exact.
    #[arg(long, conflicts_with = "state", allow_hyphen_values = true)]
    pub probs: Option<String>,
    /// JSON state file `{"group": {...}, "probs": [...]}`.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Single number of copies.
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Strictly increasing list of copy numbers, `a,b,c`.
    #[arg(long)]
    pub n_list: Option<String>,
    /// U(1) quadrature grid size (power of two).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the primary output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// G-asymmetry H and its deficit per N.
    Asymmetry {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Alignment rate and the linearized series.
    Rate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Covariant-measurement mutual information per N.
    Mi {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rate gap of a pair of cyclic states.
    Superadd {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized search for superadditive pairs.
    Search {
        /// `zM`.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gradient ascent over POVMs for the N-copy orbit ensemble.
    Optimize {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        /// Number of POVM outcomes (default M).
        #[arg(long)]
        outcomes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo simulation with the covariant measurement.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Failure with its exit code and a one-line reason.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, kind: "input_error", message: message.into() }
    }
}

impl From<qframe::Error> for CliError {
    fn from(e: qframe::Error) -> Self {
        match e {
            qframe::Error::ResourceLimit { .. } => {
                CliError { code: EXIT_RESOURCE, kind: "resource_limit", message: e.to_string() }
            }
            other => CliError::input(other.to_string()),
        }
    }
}

fn report(err: &CliError) {
    let line = serde_json::json!({ "error": err.kind, "code": err.code, "message": err.message });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            report(&CliError::input(first));
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            report(&CliError::input("--workers must be positive"));
            return ExitCode::from(EXIT_INPUT);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            report(&CliError::input(e.to_string()));
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match commands::run(cli.command, cli.workers) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            report(&e);
            ExitCode::from(e.code)
        }
    }
}
