//! Command-line front end for the qubit-channel toolkit.
//!
//! Exit codes: 0 on success, 2 for configuration or validation
//! problems (the violated constraint is named on stderr), 3 for
//! runtime resolution problems (grid resolution, output I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use redfield::scenario::{cmd_choi, cmd_fig1, cmd_simulate, cmd_sweep, Failure, Overrides};

#[derive(Parser)]
#[command(
    name = "redfield",
    version,
    about = "Qubit open-system dynamics: trajectories, Choi spectra, parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Output directory for the generated artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the number of grid samples.
    #[arg(long)]
    grid: Option<usize>,
    /// Override the positivity threshold for Choi spectra.
    #[arg(long = "tol-psd")]
    tol_psd: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            grid: self.grid,
            tol_psd: self.tol_psd,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan a configured scenario into series.csv and report.txt.
    Simulate {
        /// Scenario configuration file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in reference scenario (no configuration needed).
    Fig1 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the Choi spectrum over the scenario grid to choi.csv.
    Choi {
        /// Scenario configuration file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Also scan intermediate maps into divisibility.csv.
        #[arg(long)]
        divisibility: bool,
    },
    /// Evaluate the scenario over its sweep axes into sweep.csv.
    Sweep {
        /// Scenario configuration file with sweep.<key> axes.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate { config, common } => {
            cmd_simulate(config, &common.out, &common.overrides())
        }
        Command::Fig1 { common } => cmd_fig1(&common.out, &common.overrides()),
        Command::Choi {
            config,
            common,
            divisibility,
        } => cmd_choi(config, &common.out, &common.overrides(), *divisibility),
        Command::Sweep { config, common } => cmd_sweep(config, &common.out, &common.overrides()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
