use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod plot;

use config::{Command, Flags, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "toddsum",
    version,
    about = "Riemann sums over lattice polytopes and their Euler-Maclaurin expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Dimension, facets, simplicity, regularity and per-face torsion groups
    Validate(Flags),
    /// Lattice point counts of NΔ
    Count(Flags),
    /// Riemann sums N^{-n} Σ f(k/N)
    Sum(Flags),
    /// Expansion coefficients c_j of N^{-j}
    Expand(Flags),
    /// Truncated expansion at each N
    Estimate(Flags),
    /// Riemann sums against estimates, with a log-log slope fit
    Converge(Flags),
    /// Ehrhart sum of a polyhomogeneous symbol, its expansion and a stability fit
    Ehrhart(Flags),
    /// Runs the command named in a RunConfig file
    Run(Flags),
}

fn split(sub: Sub) -> (Option<Command>, Flags) {
    match sub {
        Sub::Validate(f) => (Some(Command::Validate), f),
        Sub::Count(f) => (Some(Command::Count), f),
        Sub::Sum(f) => (Some(Command::Sum), f),
        Sub::Expand(f) => (Some(Command::Expand), f),
        Sub::Estimate(f) => (Some(Command::Estimate), f),
        Sub::Converge(f) => (Some(Command::Converge), f),
        Sub::Ehrhart(f) => (Some(Command::Ehrhart), f),
        Sub::Run(f) => (None, f),
    }
}

fn execute(cli: Cli) -> CliResult<Option<CliError>> {
    let (command, flags) = split(cli.command);
    let cfg = RunConfig::resolve(command, &flags)?;
    if let Some(t) = cfg.thread_count()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let out = commands::run(&cfg)?;
    let mut text = serde_json::to_string_pretty(&out.report).expect("report serializes");
    text.push('\n');
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which is reserved for validation
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => {
            eprintln!("toddsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
