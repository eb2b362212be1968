//! `tstmr`: batch experiments and single-system solves.

mod config;
mod deblur;
mod fovtable;
mod illposed;
mod report;
mod solve;
mod wellposed;

use clap::{Args, Parser, Subcommand};
use config::{Config, ConfigError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "tstmr", version, about = "Two-step minimum residual experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convection–diffusion systems: TSTMR against one-dimensional MR, HSS and GMRES.
    Wellposed(BatchArgs),
    /// Regularized augmented systems of foxgood/gravity/phillips.
    Illposed(BatchArgs),
    /// Motion-blur restoration with discrepancy stopping.
    Deblur(BatchArgs),
    /// Field-of-values enclosures for augmented systems.
    Fovtable(BatchArgs),
    /// Solve a Matrix Market system.
    Solve(solve::SolveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BatchArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `run.repeat`.
    #[arg(long)]
    repeat: Option<usize>,
}

/// Everything a batch subcommand needs.
pub struct Run {
    pub cfg: Config,
    pub out: PathBuf,
    pub seed: u64,
    pub repeat: usize,
    pub history: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Io(e) => f.write_str(e),
        }
    }
}

/// Keys shared by all batch subcommands.
pub const RUN_DEFAULTS: &[(&str, &str)] = &[("run.seed", "1"), ("run.repeat", "3"), ("output.history", "true")];

impl Run {
    pub fn new(args: &BatchArgs, specific: &[(&str, &str)]) -> Result<Self, CliError> {
        let defaults: Vec<(&str, &str)> = RUN_DEFAULTS.iter().chain(specific).copied().collect();
        let mut cfg = match &args.config {
            Some(p) => Config::load(p, &defaults)?,
            None => Config::from_defaults(&defaults),
        };
        if let Some(s) = args.seed {
            cfg.set("run.seed", s.to_string());
        }
        if let Some(r) = args.repeat {
            cfg.set("run.repeat", r.to_string());
        }
        let repeat: usize = cfg.get("run.repeat")?;
        if repeat == 0 {
            return Err(ConfigError::new("run.repeat must be at least 1").into());
        }
        Ok(Self {
            seed: cfg.get("run.seed")?,
            repeat,
            history: cfg.get("output.history")?,
            cfg,
            out: args.out.clone(),
        })
    }
}

fn init_logging() -> Result<(), String> {
    let level = match std::env::var("TSTMR_LOG").as_deref() {
        Err(_) | Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Error,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(format!("TSTMR_LOG must be quiet, info or debug, got '{other}'")),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .init();
    Ok(())
}

/// Failures counted in a batch: 0 means every entry succeeded.
type Outcome = Result<usize, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_logging() {
        eprintln!("config error: {e}");
        return ExitCode::from(1);
    }
    let outcome: Outcome = match &cli.command {
        Command::Wellposed(a) => wellposed::run(a),
        Command::Illposed(a) => illposed::run(a),
        Command::Deblur(a) => deblur::run(a),
        Command::Fovtable(a) => fovtable::run(a),
        Command::Solve(a) => solve::run(a),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} solver run(s) did not succeed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
