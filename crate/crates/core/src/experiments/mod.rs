//! The six reproducible runs. Each takes its config section and a master
//! seed, returns a typed result, and can write frozen-schema CSV/JSON files.
//!
//! Every random draw comes from a stream keyed by (master seed, label,
//! replicate), and jobs are merged in grid order, so outputs do not depend
//! on thread scheduling.

mod ca_ladder;
mod coders;
mod config;
mod crypto_ladder;
mod infocheck;
mod relativistic;
mod ucurve;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use ca_ladder::{run_ca_ladder, CaLadderResult, CaRuleResult};
pub use coders::{observer_sets, run_coders, DEFAULT_CORPUS, CodersResult, CoderRow, CodelengthRow};
pub use config::{
    CaLadderConfig, CodersConfig, CryptoLadderConfig, ExperimentConfig, HmmConfig, InfocheckConfig,
    InfocheckSource, KeySpec, RelativisticConfig, UcurveConfig, UcurvePair, DEFAULT_SEED,
};
pub use crypto_ladder::{crypto_rung, run_crypto_ladder, CryptoKeyResult, CryptoLadderResult};
pub use infocheck::{run_infocheck, InfocheckResult, InfocheckSourceResult};
pub use relativistic::{run_relativistic, Family, RelativisticReplicate, RelativisticResult, RelativisticRow};
pub use ucurve::{run_ucurve, UcurveReplicate, UcurveResult, UcurveRow};

use crate::error::Result;

/// Experiment names as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Ucurve,
    Relativistic,
    CryptoLadder,
    CaLadder,
    Coders,
    Infocheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Ucurve,
        Experiment::Relativistic,
        Experiment::CryptoLadder,
        Experiment::CaLadder,
        Experiment::Coders,
        Experiment::Infocheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ucurve => "ucurve",
            Experiment::Relativistic => "relativistic",
            Experiment::CryptoLadder => "crypto-ladder",
            Experiment::CaLadder => "ca-ladder",
            Experiment::Coders => "coders",
            Experiment::Infocheck => "infocheck",
        }
    }
}

/// What a downstream renderer should do with a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Gap against noise level with mean/std bands.
    Ucurve,
    /// One bar per (source, observer family) or (source, observer set).
    Bars,
    /// Advantage profile and tail regret against budget.
    Ladder,
    /// Cumulative mass or partial sums against budget/order.
    Cdf,
    /// Scalar summaries; not plotted.
    Table,
    /// Per-replicate raw values.
    Replicates,
}

/// One file written by an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub kind: OutputKind,
    /// Data rows for CSV (header excluded); top-level entries for JSON.
    pub rows: usize,
    pub columns: Vec<String>,
}

/// Any experiment result that can be written to a directory.
pub trait Outputs {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>>;
}

pub(crate) fn write_csv(
    dir: &Path,
    name: &str,
    kind: OutputKind,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<OutputFile> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join(name))?));
    w.write_record(header)?;
    let mut count = 0;
    for row in rows {
        w.write_record(&row)?;
        count += 1;
    }
    w.flush()?;
    Ok(OutputFile {
        name: name.to_string(),
        kind,
        rows: count,
        columns: header.iter().map(|s| s.to_string()).collect(),
    })
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, entries: usize, value: &T) -> Result<OutputFile> {
    let file = BufWriter::new(File::create(dir.join(name))?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(OutputFile {
        name: name.to_string(),
        kind: OutputKind::Table,
        rows: entries,
        columns: Vec::new(),
    })
}

/// Profile columns with one leading key column.
pub(crate) fn profile_header(key: &'static str) -> Vec<&'static str> {
    std::iter::once(key).chain(crate::ladders::PROFILE_COLUMNS).collect()
}

/// Formats an optional value as an empty CSV cell when absent.
pub(crate) fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Collects per-job results, surfacing the first error in grid order.
pub(crate) fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}
