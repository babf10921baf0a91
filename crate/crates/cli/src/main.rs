//! `optoneuro`: calculators, figure datasets, simulations, and benchmarks.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optoneuro_cli::commands::{self, Eq6Args, Globals};
use optoneuro_cli::dataset::Format;
use optoneuro_cli::figures::FigureId;

#[derive(Debug, Parser)]
#[command(name = "optoneuro", version, about = "Design-space calculators and spiking-network simulator for optoelectronic hardware")]
struct Cli {
    /// Output directory [env: OPTONEURO_OUT; default: optoneuro-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed overriding the one in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Built-in platform profile: superconducting-4K or semiconductor-300K.
    #[arg(long, global = true)]
    profile: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Config file (a path, or a bundled name for simulate and membench).
    #[arg(long, global = true)]
    config: Option<String>,
    /// Override a config or figure parameter, e.g. --set simulation.seed=3.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one formula; `calc list` shows them all.
    Calc {
        formula: Option<String>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Write a figure dataset (all figures when no id is given).
    Figure {
        #[arg(value_enum)]
        id: Option<FigureId>,
    },
    /// Run a simulation scenario and write spikes and the energy ledger.
    Simulate {
        /// Scenario file or bundled scenario name.
        scenario: Option<String>,
    },
    /// Compare random-graph path lengths with the closed-form prediction.
    #[command(name = "validate-eq6")]
    ValidateEq6 {
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "20")]
        k: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 0.15)]
        tolerance: f64,
    },
    /// Score memory technologies against the derived synaptic targets.
    Membench,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = Globals {
        out: cli.out.clone().unwrap_or_else(commands::default_out_dir),
        seed: cli.seed,
        profile: cli.profile.clone(),
        format: cli.format,
        config: cli.config.clone(),
        sets: cli.sets.clone(),
    };
    let result = match &cli.command {
        Command::Calc { formula, params } => commands::calc(&globals, formula.as_deref(), params).map(|t| (t, true)),
        Command::Figure { id } => commands::figure(&globals, *id).map(|t| (t, true)),
        Command::Simulate { scenario } => commands::simulate(&globals, scenario.as_deref()).map(|t| (t, true)),
        Command::ValidateEq6 { n, k, seeds, tolerance } => {
            commands::validate(&globals, &Eq6Args { n: n.clone(), k: k.clone(), seeds: *seeds, tolerance: *tolerance })
        }
        Command::Membench => commands::membench(&globals).map(|t| (t, true)),
    };
    match result {
        Ok((text, ok)) => {
            // A closed pipe (e.g. `| head`) is not a failure of the command.
            let _ = writeln!(std::io::stdout(), "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed: results outside tolerance");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
