//! `mudforce`: simulate, calibrate and evaluate the foot/mud resistive force
//! model from the command line.

mod calibrate;
mod common;
mod error;
mod evaluate;
mod protocol;
mod simulate;
mod svg;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::common::Global;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "mudforce",
    version,
    about = "Foot/mud resistive force simulator and calibrator"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a protocol or recorded trial and write the force trace.
    Simulate(simulate::Args),
    /// Fit the nine model constants to recorded trials.
    Calibrate(calibrate::Args),
    /// Error profile and per-trial RMSE of a parameter set against trials.
    Evaluate(evaluate::Args),
    /// Summary metrics across water contents or velocities.
    Sweep(sweep::Args),
    /// Write a protocol trajectory as a trial file, optionally with a
    /// synthesized force column.
    ProtocolGen(protocol::Args),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Simulate(args) => simulate::run(g, args),
        Command::Calibrate(args) => calibrate::run(g, args),
        Command::Evaluate(args) => evaluate::run(g, args),
        Command::Sweep(args) => sweep::run(g, args),
        Command::ProtocolGen(args) => protocol::run(g, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
