use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qprojectile::io::{read_config, write_metadata, write_metrics, write_series, OutputBundle};
use qprojectile::{analytic_closest_approach, coupling_constant, run_comparison, UnitSystem};

#[derive(Parser)]
#[command(name = "qprojectile", version, about = "Quantum vs classical head-on Coulomb collision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the paired quantum/classical simulation and write CSV, metrics and metadata.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the analytic head-on distance of closest approach k/E in fm.
    Oracle {
        /// Total energy in MeV.
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        z1: i64,
        #[arg(long)]
        z2: i64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { config, out_dir } => {
            let config = read_config(&config)?;
            std::fs::create_dir_all(&out_dir)?;
            let out = run_comparison(&config)?;
            let bundle = OutputBundle::in_dir(&out_dir);
            write_series(&out.series, &bundle.series_csv)?;
            write_metrics(&out.metrics, &bundle.metrics)?;
            write_metadata(&config, &out.metadata, &bundle.metadata)?;
            println!("{}", bundle.series_csv.display());
            println!("{}", bundle.metrics.display());
            println!("{}", bundle.metadata.display());
        }
        Command::Validate { config } => {
            let config = read_config(&config)?;
            println!(
                "ok: {} sigma value(s), {} steps, {} samples",
                config.sigma_list.len(),
                config.total_steps(),
                config.sample_count()
            );
        }
        Command::Oracle { energy, z1, z2 } => {
            let k = coupling_constant(z1, z2, &UnitSystem::default())?;
            println!("{}", analytic_closest_approach(energy, k)?);
        }
    }
    Ok(())
}
