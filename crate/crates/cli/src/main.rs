//! `idm`: intrinsic-decoherence metrology from the command line.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod reproduce;
mod table;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Worker-count override for the rayon pool.
const WORKERS_VAR: &str = "IDM_WORKERS";

fn init_workers() -> CliResult<()> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::key(WORKERS_VAR, format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::key(WORKERS_VAR, e))
}

fn run(cli: Cli) -> CliResult<()> {
    init_workers()?;
    let (common, out) = match &cli.command {
        Command::Evolve(c) | Command::Qfi(c) | Command::Fi(c) | Command::Iterate(c) => {
            let cfg = RunConfig::resolve(c)?;
            let out = match &cli.command {
                Command::Evolve(_) => commands::evolve(&cfg)?,
                Command::Qfi(_) => commands::qfi(&cfg)?,
                Command::Fi(_) => commands::fi(&cfg)?,
                _ => commands::iterate(&cfg)?,
            };
            (cfg, out)
        }
        Command::Sweep { common, axes, values } => {
            let cfg = RunConfig::resolve(common)?;
            let out = commands::sweep(&cfg, axes, values)?;
            (cfg, out)
        }
        Command::Optimize { target, common, alphas } => {
            let cfg = RunConfig::resolve(common)?;
            let out = commands::optimize(&cfg, *target, alphas.as_deref())?;
            (cfg, out)
        }
        Command::Reproduce { target, common } => {
            let cfg = RunConfig::resolve(common)?;
            return reproduce::reproduce(&cfg, *target);
        }
    };
    out.emit(common.format, common.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("idm: {e}");
            e.exit_code()
        }
    }
}
