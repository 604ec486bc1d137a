//! Command-line front end: scenario runs, figure-family reproduction,
//! analytic energy tables and codec self-tests.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on runtime
//! errors.

use clap::{Parser, Subcommand};
use cooplink_cli::commands::{self, CommandError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cooplink",
    about = "Link-level simulator for energy-aware error control over cooperative relay links",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file and emit its table.
    Run {
        /// Sectioned key=value configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a preconfigured figure family (fig5..fig9), one CSV per
    /// curve.
    Figure {
        /// Figure name: fig5, fig6, fig7, fig8 or fig9.
        name: String,
        /// Directory the curve CSVs are written into.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the per-point trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Master seed for the family.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Emit the closed-form per-packet energy/efficiency table for all
    /// three topologies across the configured sweep.
    EnergyTable {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codec subcommands.
    Codecs {
        #[command(subcommand)]
        command: CodecsCommand,
    },
}

#[derive(Subcommand)]
enum CodecsCommand {
    /// Exhaustive built-in codec checks plus conformance-vector
    /// verification.
    Selftest {
        /// External vector file to verify instead of the built-in set.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Run { config, seed, out } => {
            commands::cmd_run(&config, seed, out.as_deref())
        }
        Command::Figure { name, out_dir, trials, seed, workers } => {
            let written = commands::cmd_figure(&name, &out_dir, trials, seed, workers)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::EnergyTable { config, out } => {
            commands::cmd_energy_table(&config, out.as_deref())
        }
        Command::Codecs { command: CodecsCommand::Selftest { vectors } } => {
            let report = commands::run_codecs_selftest(vectors.as_deref())?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
