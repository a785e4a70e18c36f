use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qlrlab::labcli::{load_settings, run_and_write, Command, Overrides};
use qlrlab::response::Parameterization;

/// Metric-singularity laboratory for linear-response excitation energies.
#[derive(Debug, Parser)]
#[command(name = "qlrlab", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration file (defaults are used for anything missing).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: results/<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shots per Pauli term.
    #[arg(long)]
    shots: Option<u64>,
    /// Noisy repetitions.
    #[arg(long)]
    reps: Option<usize>,
    /// Restrict the run to one parameterization.
    #[arg(long, value_parser = ["naive", "proj", "sc", "st"])]
    param: Option<String>,
    /// Add eps·I to the metric before solving (outputs are marked REGULARIZED).
    #[arg(long, value_name = "EPS")]
    regularize: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        shots: cli.shots,
        reps: cli.reps,
        param: cli
            .param
            .map(|p| p.parse::<Parameterization>().expect("validated by clap")),
        regularize: cli.regularize,
    };
    let result =
        load_settings(cli.command, cli.config.as_deref(), &overrides).and_then(|settings| {
            run_and_write(&settings, cli.config.as_deref()).map(|r| (settings, r))
        });
    match result {
        Ok((settings, (_, manifest))) => {
            for f in &manifest.files {
                println!("{}/{} ({} rows)", settings.out.display(), f.name, f.rows);
            }
            for n in &manifest.notes {
                println!("note: {n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qlrlab: {e}");
            ExitCode::FAILURE
        }
    }
}
