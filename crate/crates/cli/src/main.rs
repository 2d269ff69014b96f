//! `clcgan`: command-line frontend for the Dirac GAN control analysis,
//! simulators and replay-buffer CLC-GAN training.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad flags or configuration
//! (including an empty sweep grid), 3 a simulation produced non-finite
//! values without a recognized divergence, 4 training stopped on a
//! non-finite parameter (partial outputs are still written).

mod analysis;
mod config;
mod schema;
mod simulate;
mod sweep;
mod train;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use analysis::{System, SystemArgs};
use config::{RunConfig, UsageError};

#[derive(Parser, Debug)]
#[command(name = "clcgan", version, about = "Control-theoretic GAN dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transfer functions, poles and stability class of a Dirac GAN.
    Poles(SystemArgs),
    /// Linearization at the equilibrium, its eigenvalues and the regularized Jacobian.
    Linearize(SystemArgs),
    /// Simulate one Dirac GAN trajectory and write it as CSV.
    Simulate(simulate::SimulateArgs),
    /// Train a CLC-GAN on a 2-D Gaussian mixture.
    Train(train::TrainArgs),
    /// Run a grid of simulations or trainings.
    Sweep(sweep::SweepArgs),
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    let text = serde_json::to_string_pretty(value)?;
    // A closed pipe (`clcgan poles | head`) is not a failure of the run.
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Poles(args) => {
            let cfg = RunConfig::load_opt(args.config.as_deref())?;
            print_json(&analysis::poles(&System::resolve(&args, &cfg)?)?)?;
        }
        Command::Linearize(args) => {
            let cfg = RunConfig::load_opt(args.config.as_deref())?;
            print_json(&analysis::linearize_report(&System::resolve(&args, &cfg)?)?)?;
        }
        Command::Simulate(args) => {
            let run = simulate::run(&args)?;
            print_json(&run.report)?;
            if run.unexplained_non_finite() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Train(args) => {
            let report = train::run(&args)?;
            print_json(&report)?;
            if train::failed(&report) {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Sweep(args) => print_json(&sweep::run(&args)?)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
