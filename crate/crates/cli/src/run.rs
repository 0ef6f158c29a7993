//! Runs one experiment into a staging directory, writes the manifest, then
//! renames the directory into place so a failed run leaves nothing behind.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use caa_core::experiments::{
    run_ca_ladder, run_coders, run_crypto_ladder, run_infocheck, run_relativistic, run_ucurve, Experiment,
    ExperimentConfig, OutputFile, Outputs,
};
use caa_core::rng::PRNG_DESCRIPTION;
use caa_core::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub enum RunError {
    Config(Error),
    Failed(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::InvalidParameter { .. } => RunError::Config(e),
            other => RunError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failed(e.to_string())
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Failed(e) => f.write_str(e),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    seed: u64,
    /// SHA-256 of the canonical JSON of `config`.
    config_hash: String,
    config: &'a ExperimentConfig,
    prng: &'static str,
    outputs: Vec<OutputFile>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serialises");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

fn execute(experiment: Experiment, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<OutputFile>, Error> {
    let seed = cfg.seed;
    match experiment {
        Experiment::Ucurve => run_ucurve(&cfg.ucurve, seed)?.write(dir),
        Experiment::Relativistic => run_relativistic(&cfg.relativistic, seed)?.write(dir),
        Experiment::CryptoLadder => run_crypto_ladder(&cfg.crypto_ladder, seed)?.write(dir),
        Experiment::CaLadder => run_ca_ladder(&cfg.ca_ladder, seed)?.write(dir),
        Experiment::Coders => run_coders(&cfg.coders, seed)?.write(dir),
        Experiment::Infocheck => run_infocheck(&cfg.infocheck, seed)?.write(dir),
    }
}

pub fn run(experiment: Experiment, cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, RunError> {
    fs::create_dir_all(out)?;
    let name = experiment.name();
    let staging = out.join(format!(".{name}.staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging)?;
    let result = execute(experiment, cfg, &staging).map_err(RunError::from).and_then(|outputs| {
        let manifest = Manifest {
            tool: "caa",
            version: env!("CARGO_PKG_VERSION"),
            experiment: name,
            seed: cfg.seed,
            config_hash: config_hash(cfg),
            config: cfg,
            prng: PRNG_DESCRIPTION,
            outputs,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Failed(e.to_string()))?;
        fs::write(staging.join("manifest.json"), text + "\n")?;
        Ok(())
    });
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    let target = out.join(name);
    if target.exists() {
        fs::remove_dir_all(&target)?;
    }
    fs::rename(&staging, &target)?;
    Ok(target)
}
