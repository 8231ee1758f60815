use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use pdeid_cli::commands;

/// Identify PDE models from noisy spatio-temporal data: simulate
/// benchmark fields, estimate derivatives with smoothing splines,
/// select active terms by l1-penalized regression, diagnose the
/// recovery conditions and forecast with explicit Euler.
#[derive(Parser)]
#[command(name = "pdeid", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate clean and noisy benchmark fields.
    Simulate(commands::simulate::SimulateArgs),
    /// Identify the governing PDE of a field CSV.
    Identify(commands::identify::IdentifyArgs),
    /// Identification accuracy over noisy replicates.
    Montecarlo(commands::montecarlo::MontecarloArgs),
    /// Counted-operation complexity of the stage-one estimators.
    Benchmark(commands::benchmark::BenchmarkArgs),
    /// Identify, roll forward with explicit Euler, score residuals.
    Forecast(commands::forecast::ForecastArgs),
    /// Support-recovery condition diagnostics for a declared support.
    Diagnose(commands::diagnose::DiagnoseArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Identify(args) => commands::identify::run(args),
        Command::Montecarlo(args) => commands::montecarlo::run(args),
        Command::Benchmark(args) => commands::benchmark::run(args),
        Command::Forecast(args) => commands::forecast::run(args),
        Command::Diagnose(args) => commands::diagnose::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("pdeid: error: {err}");
            ExitCode::from(err.kind as u8)
        }
    }
}
