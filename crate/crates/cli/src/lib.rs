//! Command-line front end for `weylkit`.
//!
//! Three subcommands: `generate` writes a Weyl system as JSON, `certify`
//! audits one, and `interpolate` searches for ucp maps between tuples.

mod certify;
mod generate;
mod interpolate;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use certify::{CertifyReport, Check};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_UNDETERMINED: i32 = 4;

/// Environment variable read when `--tol` is absent.
pub const TOL_ENV: &str = "WEYLKIT_TOL";

#[derive(Debug, Parser)]
#[command(name = "weylkit", version, about = "Construct and certify Weyl commutation systems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a Weyl system as JSON.
    Generate(GenerateArgs),
    /// Check relations, canonical form and structure of a Weyl system.
    Certify(CertifyArgs),
    /// Search for a ucp map carrying generators onto targets.
    Interpolate(InterpolateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pair,
    Triple,
    Brauer,
    Random,
    Counterexample,
    Ew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file, written atomically. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tolerance override. Falls back to $WEYLKIT_TOL.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    p: u64,
    /// Multiplicity for `random`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of Weyl–Brauer iterations for `brauer`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// WeylSystem JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct InterpolateArgs {
    /// Generators, then targets. A single file asks for a self-map.
    #[arg(long = "in", num_args = 1)]
    inputs: Vec<PathBuf>,
    /// Run the dilation search for the clock and shift pair instead.
    #[arg(long)]
    rigidity: bool,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    p: u64,
    #[arg(long, default_value_t = 1)]
    ell: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds for `--rigidity`.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[arg(long, default_value_t = weylkit::feasibility::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure before a command could produce its report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] weylkit::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        }
    }
}

fn resolve_tol(flag: Option<f64>, env: Option<String>) -> Result<Option<f64>, CliError> {
    let tol = match (flag, env) {
        (Some(t), _) => Some(t),
        (None, Some(raw)) => Some(
            raw.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}={raw:?} is not a number")))?,
        ),
        (None, None) => None,
    };
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(CliError::Usage(format!("tolerance must be positive, got {t}"))),
        _ => Ok(tol),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Reports go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let env_tol = std::env::var(TOL_ENV).ok();
    let outcome = match cli.command {
        Command::Generate(args) => generate::run(&args, env_tol, stdout),
        Command::Certify(args) => certify::run(&args, env_tol, stdout),
        Command::Interpolate(args) => interpolate::run(&args, env_tol, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_environment() {
        assert_eq!(resolve_tol(Some(1e-6), Some("1e-3".into())).unwrap(), Some(1e-6));
        assert_eq!(resolve_tol(None, Some(" 1e-3 ".into())).unwrap(), Some(1e-3));
        assert_eq!(resolve_tol(None, None).unwrap(), None);
    }

    #[test]
    fn bad_tolerances_are_usage_errors() {
        assert!(matches!(
            resolve_tol(None, Some("tiny".into())),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(resolve_tol(Some(-1.0), None), Err(CliError::Usage(_))));
        assert!(matches!(resolve_tol(Some(f64::NAN), None), Err(CliError::Usage(_))));
    }
}
