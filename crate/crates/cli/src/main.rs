//! `oulink`: analytic curves, simulations, verification and level-crossing runs for the
//! link SNR between two Ornstein-Uhlenbeck mobile nodes.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RawConfig;
use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "oulink", version, about = "Link SNR statistics under Ornstein-Uhlenbeck mobility")]
struct Cli {
    /// `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "OULINK_OUT_DIR", default_value = "oulink-out")]
    out: PathBuf,
    #[command(flatten)]
    params: RawConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate an analytic distribution on a grid.
    Dist(commands::dist::DistArgs),
    /// Simulate sample paths.
    Simulate(commands::simulate::SimulateArgs),
    /// Run the Monte Carlo verification suite.
    Verify(commands::verify::VerifyArgs),
    /// On/off sojourns of a stationary SNR path around the threshold.
    Crossings(commands::crossings::CrossingsArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let base = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let config = base.overlay(cli.params).resolve()?;
    match cli.command {
        Command::Dist(a) => commands::dist::run(&a, &config, &cli.out),
        Command::Simulate(a) => commands::simulate::run(&a, &config, &cli.out),
        Command::Verify(a) => commands::verify::run(&a, &config, &cli.out),
        Command::Crossings(a) => commands::crossings::run(&a, &config, &cli.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oulink: {e}");
            e.exit_code()
        }
    }
}
