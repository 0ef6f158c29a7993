//! `caa`: runs one experiment and writes CSV/JSON results plus a manifest.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use caa_core::experiments::Experiment;

#[derive(Debug, Parser)]
#[command(name = "caa", version, about = "Regret-dispersion experiments over observer ladders")]
struct Cli {
    /// TOML config file; omitted keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output root; each run writes to `<out>/<experiment>/`.
    #[arg(long, global = true, default_value = "caa-out")]
    out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Config override such as `ucurve.n=20000` or `ca_ladder.rules=[90,30]`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gap between two Markov orders on periodic-plus-noise sources.
    Ucurve,
    /// HMM versus XOR ciphertext under statistical and key-search families.
    Relativistic,
    /// Key-length ladder on repeating-key XOR ciphertext.
    CryptoLadder,
    /// Simulation-radius ladder on elementary cellular automata.
    CaLadder,
    /// Excess-codelength dispersion across lossless coders.
    Coders,
    /// CMI atoms and truncated excess entropy on finite-order chains.
    Infocheck,
    /// Print the effective config as TOML and exit.
    ShowConfig,
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Ucurve => Experiment::Ucurve,
            Command::Relativistic => Experiment::Relativistic,
            Command::CryptoLadder => Experiment::CryptoLadder,
            Command::CaLadder => Experiment::CaLadder,
            Command::Coders => Experiment::Coders,
            Command::Infocheck => Experiment::Infocheck,
            Command::ShowConfig => return None,
        })
    }
}

/// Exit status for invalid configuration; clap uses the same code for bad
/// arguments.
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::load(cli.config.as_deref(), &cli.overrides, cli.seed) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let Some(experiment) = cli.command.experiment() else {
        match toml::to_string(&cfg) {
            Ok(text) => {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = caa_core::par::set_threads(jobs) {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run::run(experiment, &cfg, &cli.out) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(run::RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(run::RunError::Failed(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
