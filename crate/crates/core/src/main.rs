use clap::{Parser, Subcommand};
use sphereflow::config::{config_hash, parse_config};
use sphereflow::error::Error;
use sphereflow::runner;
use sphereflow::snapshot::load_snapshot;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Pseudospectral Navier-Stokes solver on the rotating unit sphere.
#[derive(Parser)]
#[command(name = "sphereflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Run { config: PathBuf },
    /// Print the energy spectrum of a snapshot as CSV.
    Spectra { snapshot: PathBuf },
    /// Print the slaved-shell (approximate inertial manifold) spectrum of
    /// a snapshot under a config's parameters.
    Manifold { snapshot: PathBuf, config: PathBuf },
    /// Run the built-in invariant suite.
    Validate,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config { .. }
        | Error::ConfigGeneral(_)
        | Error::Domain(_)
        | Error::DimensionMismatch(_)
        | Error::TruncationExceeded { .. } => 1,
        Error::Integration(_) => 2,
        Error::SnapshotFormat(_) | Error::SnapshotVersion { .. } | Error::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run_cmd(&config),
        Command::Spectra { snapshot } => spectra_cmd(&snapshot),
        Command::Manifold { snapshot, config } => manifold_cmd(&snapshot, &config),
        Command::Validate => {
            return if runner::validate() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn read_config(path: &Path) -> Result<(sphereflow::config::SimulationConfig, u64), Error> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse_config(&text)?;
    Ok((cfg, config_hash(&text)))
}

fn run_cmd(path: &Path) -> Result<(), Error> {
    let (cfg, hash) = read_config(path)?;
    let artifacts = runner::run(&cfg, hash)?;
    println!(
        "done: t = {:.6}, {} steps accepted, {} rejected ({} Newton), {} rhs evaluations",
        artifacts.final_t,
        artifacts.stats.accepted,
        artifacts.stats.rejected_error + artifacts.stats.rejected_newton,
        artifacts.stats.rejected_newton,
        artifacts.stats.rhs_evaluations
    );
    Ok(())
}

fn spectra_cmd(path: &Path) -> Result<(), Error> {
    let (alpha, meta) = load_snapshot(path)?;
    print!("{}", runner::spectra_csv(&alpha, meta.t));
    Ok(())
}

fn manifold_cmd(snapshot: &Path, config: &Path) -> Result<(), Error> {
    let (alpha, meta) = load_snapshot(snapshot)?;
    let (cfg, _) = read_config(config)?;
    print!("{}", runner::manifold_csv(&alpha, meta.t, &cfg)?);
    Ok(())
}
