//! Command-line driver for the bigraded Toda hierarchy.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use commands::{lattice, miura, tau};
use error::CliError;
use output::Sink;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bth", version, about = "Tau functions, Lax flows and Miura maps of the bigraded Toda hierarchy")]
struct Cli {
    /// JSON object with default values for the subcommand's options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (else $BTH_OUT_DIR, else ./bth-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rational tau sequence from a double Wronskian, with its Young expansion.
    RationalTau(tau::RationalTauArgs),
    /// Tau sequence from a random polynomial moment matrix.
    MomentTau(tau::MomentTauArgs),
    /// Bilinear residuals of a tau sequence.
    HirotaCheck(tau::TauSource),
    /// Lax entries from a tau sequence by both formulas.
    LaxFromTau(tau::LaxArgs),
    /// Upper and lower fractional roots of a Lax operator.
    FracPower(lattice::FracPowerArgs),
    /// RK4 integration of a Lax flow.
    Evolve(lattice::EvolveArgs),
    /// Commutator defect of every pair of primary flows.
    CommuteCheck(lattice::CommuteArgs),
    /// Flow correspondence under the (N,M) to (M,N) map.
    MiuraCheck(miura::MiuraArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let sink = Sink::resolve(cli.out_dir);
    let file = cli.config.as_deref();
    match cli.command {
        Command::RationalTau(a) => tau::rational(config::layered(a, file)?, &sink),
        Command::MomentTau(a) => tau::moment(config::layered(a, file)?, &sink),
        Command::HirotaCheck(a) => tau::hirota(config::layered(a, file)?, &sink),
        Command::LaxFromTau(a) => tau::lax(config::layered(a, file)?, &sink),
        Command::FracPower(a) => lattice::frac_power(config::layered(a, file)?, &sink),
        Command::Evolve(a) => lattice::evolve(config::layered(a, file)?, &sink),
        Command::CommuteCheck(a) => lattice::commute(config::layered(a, file)?, &sink),
        Command::MiuraCheck(a) => miura::miura(config::layered(a, file)?, &sink),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
