//! Command-line driver for `qcopula`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success |
//! | 1    | an experiment had failing cases |
//! | 2    | an iteration did not converge |
//! | 3    | invalid input, config or file error |
//! | 4    | unknown experiment suite |
//! | 5    | other numerical failure |
//! | 64   | command-line usage error |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qcopula::SolverConfig;
use thiserror::Error;

pub mod experiment;
pub mod report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CASES_FAILED: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_UNKNOWN_SUITE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("unknown suite '{0}' (expected one of: {names})", names = experiment::SUITES.join(", "))]
    UnknownSuite(String),

    #[error("{0}")]
    Core(#[from] qcopula::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qcopula::Error as E;
        match self {
            CliError::Io { .. } | CliError::Config { .. } => EXIT_INVALID_INPUT,
            CliError::UnknownSuite(_) => EXIT_UNKNOWN_SUITE,
            CliError::Core(e) => match e {
                E::NotConverged { .. } | E::SinkhornNotConverged { .. } => EXIT_NOT_CONVERGED,
                E::NonFinite
                | E::NotSquare { .. }
                | E::ShapeMismatch { .. }
                | E::NotHermitian { .. }
                | E::NotPsd { .. }
                | E::InvalidTrace { .. }
                | E::InvalidDimensions(_)
                | E::InvalidArgument(_)
                | E::ZeroMatrix
                | E::RankDeficient { .. }
                | E::NonPositiveEntry { .. }
                | E::Parse(_) => EXIT_INVALID_INPUT,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcopula",
    version,
    about = "Quantum copulas of bipartite states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the copula representative of a state file.
    Copula(CopulaArgs),
    /// Run a property suite over random states.
    Experiment(ExperimentArgs),
    /// Sinkhorn-scale a positive real matrix.
    Classical(ClassicalArgs),
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Fixed-point tolerance in the Hilbert metric.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Mix in ε·I/(nm) before solving.
    #[arg(long)]
    pub regularize: bool,
    #[arg(long)]
    pub reg_eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CopulaArgs {
    /// Density-matrix JSON file.
    pub input: PathBuf,
    /// JSON file with solver settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Write `timing_ms: null` so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of preserve-separability, uniqueness, convergence, lambda, metric-axioms.
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Subsystem dimensions as `n,m`.
    #[arg(long, default_value = "2,2", value_parser = parse_dims)]
    pub dims: (usize, usize),
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    /// Real matrix JSON: rows, or `{"matrix": rows}`.
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = qcopula::sinkhorn::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = qcopula::sinkhorn::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(',')
        .ok_or_else(|| format!("expected n,m but got '{s}'"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| format!("'{t}' is not a positive integer"))
    };
    Ok((parse(n)?, parse(m)?))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Defaults, then the config file, then flags.
pub fn effective_config(
    config: Option<&Path>,
    flags: &SolverFlags,
) -> Result<SolverConfig, CliError> {
    let mut cfg = match config {
        Some(path) => {
            let bytes = read(path)?;
            serde_json::from_slice(&bytes).map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        }
        None => SolverConfig::default(),
    };
    if let Some(tol) = flags.tol {
        cfg.tol = tol;
    }
    if let Some(max_iter) = flags.max_iter {
        cfg.max_iter = max_iter;
    }
    if flags.regularize {
        cfg.regularize = true;
    }
    if let Some(eps) = flags.reg_eps {
        cfg.reg_eps = eps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

pub fn cmd_copula(args: &CopulaArgs) -> Result<i32, CliError> {
    let cfg = effective_config(args.config.as_deref(), &args.solver)?;
    let bytes = read(&args.input)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| qcopula::Error::Parse(format!("input is not UTF-8: {e}")))?;
    let rho = qcopula::io::parse_density_matrix(&text)?;
    let started = std::time::Instant::now();
    let outcome = qcopula::copula_of(&rho, &cfg);
    let timing_ms = (!args.no_timing).then(|| started.elapsed().as_secs_f64() * 1e3);
    let digest = report::digest(&bytes);
    match outcome {
        Ok(result) => {
            let doc = report::CopulaDocument::new(&rho, &result, &cfg, digest, timing_ms);
            emit(args.output.as_deref(), &doc.to_json())?;
            Ok(EXIT_OK)
        }
        Err(qcopula::Error::NotConverged { report: fp }) => {
            let doc = report::NotConvergedDocument::new(&rho, &fp, &cfg, digest, timing_ms);
            emit(args.output.as_deref(), &doc.to_json())?;
            eprintln!(
                "error: fixed-point iteration did not converge after {} iterations (last step {:.3e})",
                fp.iterations, fp.final_step
            );
            Ok(EXIT_NOT_CONVERGED)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<i32, CliError> {
    let suite: experiment::Suite = args
        .suite
        .parse()
        .map_err(|_| CliError::UnknownSuite(args.suite.clone()))?;
    let cfg = effective_config(args.config.as_deref(), &args.solver)?;
    if args.count == 0 {
        return Err(qcopula::Error::InvalidArgument("count must be at least 1".into()).into());
    }
    let summary = experiment::run_suite(suite, args.seed, args.count, args.dims, &cfg)?;
    emit(args.output.as_deref(), &summary.to_json())?;
    Ok(if summary.failed == 0 {
        EXIT_OK
    } else {
        EXIT_CASES_FAILED
    })
}

pub fn cmd_classical(args: &ClassicalArgs) -> Result<i32, CliError> {
    let bytes = read(&args.input)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| qcopula::Error::Parse(format!("input is not UTF-8: {e}")))?;
    let a = qcopula::io::parse_real_matrix(&text)?;
    let pair = qcopula::sinkhorn_scale(&a, args.tol, args.max_iter)?;
    emit(args.output.as_deref(), &report::scaling_json(&pair))?;
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Copula(args) => cmd_copula(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Classical(args) => cmd_classical(args),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
