//! `oscmap`: exact oscillator pairs, tunneling barriers and the range
//! experiment from the command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 phase not monotone,
//! 4 I/O error, 5 tunnel design missed on `--verify`, 6 a range inequality
//! failed, 7 verification failed.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{hermite, pair_gen, range, tunnel, verify};
use config::{CommandName, Layered};
use error::CliError;

const THREADS_VAR: &str = "OSCMAP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "oscmap",
    version,
    about = "Exact solutions of time-dependent harmonic oscillators"
)]
struct Cli {
    /// JSON run configuration; command-line flags win on conflict.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    PairGen(pair_gen::PairGenArgs),
    Tunnel(tunnel::TunnelArgs),
    Range(range::RangeArgs),
    Verify(verify::VerifyArgs),
    Hermite(hermite::HermiteArgs),
}

impl Command {
    fn name(&self) -> CommandName {
        match self {
            Command::PairGen(_) => CommandName::PairGen,
            Command::Tunnel(_) => CommandName::Tunnel,
            Command::Range(_) => CommandName::Range,
            Command::Verify(_) => CommandName::Verify,
            Command::Hermite(_) => CommandName::Hermite,
        }
    }

    /// Builds the command from a config file, layering `cli` on top.
    fn from_config(cfg: config::RunConfig, cli: Option<Command>) -> Result<Command, CliError> {
        if let Some(c) = &cli {
            if c.name() != cfg.command {
                return Err(CliError::usage(format!(
                    "config is for '{}' but the command line asks for '{}'",
                    cfg.command.as_str(),
                    c.name().as_str()
                )));
            }
        }
        // Names agree at this point, so each arm only unwraps its own variant.
        Ok(match cfg.command {
            CommandName::PairGen => {
                let c = match cli {
                    Some(Command::PairGen(a)) => Some(a),
                    _ => None,
                };
                Command::PairGen(Layered::from_config(cfg, c)?)
            }
            CommandName::Tunnel => {
                let c = match cli {
                    Some(Command::Tunnel(a)) => Some(a),
                    _ => None,
                };
                Command::Tunnel(Layered::from_config(cfg, c)?)
            }
            CommandName::Range => {
                let c = match cli {
                    Some(Command::Range(a)) => Some(a),
                    _ => None,
                };
                Command::Range(Layered::from_config(cfg, c)?)
            }
            CommandName::Verify => {
                let c = match cli {
                    Some(Command::Verify(a)) => Some(a),
                    _ => None,
                };
                Command::Verify(Layered::from_config(cfg, c)?)
            }
            CommandName::Hermite => {
                let c = match cli {
                    Some(Command::Hermite(a)) => Some(a),
                    _ => None,
                };
                Command::Hermite(Layered::from_config(cfg, c)?)
            }
        })
    }

    fn run(self) -> Result<(), CliError> {
        match self {
            Command::PairGen(a) => pair_gen::run(a),
            Command::Tunnel(a) => tunnel::run(a),
            Command::Range(a) => range::run(a),
            Command::Verify(a) => verify::run(a),
            Command::Hermite(a) => hermite::run(a),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            CliError::usage(format!(
                "{THREADS_VAR} must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let command = match (cli.config, cli.command) {
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::usage("no subcommand given (try --help)")),
        (Some(path), c) => Command::from_config(config::load(&path)?, c)?,
    };
    command.run()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
