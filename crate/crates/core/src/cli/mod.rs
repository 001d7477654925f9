//! The `intlog` command line: `check`, `construct` and `lemma`.

mod commands;
pub mod files;
pub mod instances;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::measure::TOLERANCE;

pub use files::{emit_structure, emit_theory, load_structure, load_theory, InputError};

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkbenchConfig {
    pub tolerance: f64,
    /// `None` means the command's default (or an instance file's own setting).
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub max_points: usize,
    pub emit_structure: Option<PathBuf>,
    pub emit_theory: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "intlog", version, about = "Integration-logic workbench")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Approximation parameter.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Floating-point allowance added to every comparison.
    #[arg(long, global = true, default_value_t = TOLERANCE)]
    tol: f64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest domain an instance may declare.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_points: usize,
    /// Write the constructed model as a structure file.
    #[arg(long, global = true)]
    emit_structure: Option<PathBuf>,
    /// Write the theory the model was checked against.
    #[arg(long, global = true)]
    emit_theory: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every statement of a theory file in a structure file.
    Check { structure: String, theory: String },
    /// Run a construction on an instance file.
    Construct { kind: Kind, instance: String },
    /// Run one lattice lemma and print its trace.
    Lemma(LemmaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Stone,
    Daniell,
    Riesz,
    Pushdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaName {
    Tendtochar,
    Inessential,
    #[value(name = "refine_cover", alias = "refine-cover")]
    RefineCover,
    #[value(name = "special_pair", alias = "special-pair")]
    SpecialPair,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    pub name: LemmaName,
    /// Function values, comma separated; repeat for several functions.
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: Vec<String>,
    /// Second function of a special pair.
    #[arg(long = "g", allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Interval such as `(0.5,inf)` or `[1,2]`; one per `--f` for tendtochar.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Vec<String>,
    /// How tendtochar combines several constraints.
    #[arg(long, value_enum, default_value = "intersection")]
    pub combine: CombineArg,
    /// Point weights, comma separated; uniform when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Lower end of the inessential search interval.
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the inessential search interval.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Point indices of one cover member; repeat per member.
    #[arg(long)]
    pub cover: Vec<String>,
    /// Point indices of the set to cover; all points when omitted.
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombineArg {
    Intersection,
    Union,
}

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

/// Failures that stop a command before a verdict.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Runs the command line and returns the exit code: 0 pass, 1 check failure, 2 input
/// or engine error.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let g = cli.global;
    let config = WorkbenchConfig {
        tolerance: g.tol,
        epsilon: g.epsilon,
        seed: g.seed,
        max_points: g.max_points,
        emit_structure: g.emit_structure,
        emit_theory: g.emit_theory,
    };
    let result = if !(config.tolerance > 0.0 && config.tolerance.is_finite()) {
        Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            config.tolerance
        )))
    } else if config.epsilon.is_some_and(|e| !(e >= 0.0 && e.is_finite())) {
        Err(CliError::Usage(
            "--epsilon must be a finite number ≥ 0".into(),
        ))
    } else {
        match &cli.command {
            Command::Check { structure, theory } => commands::check(structure, theory, &config),
            Command::Construct { kind, instance } => commands::construct(*kind, instance, &config),
            Command::Lemma(args) => commands::lemma(args, &config),
        }
    };
    match result {
        Ok((report, outcome)) => {
            let _ = write!(out, "{report}");
            match outcome {
                Outcome::Pass => 0,
                Outcome::Fail => 1,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
