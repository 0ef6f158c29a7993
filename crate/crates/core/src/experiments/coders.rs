use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{collect, write_csv, CodersConfig, OutputFile, OutputKind, Outputs};
use crate::error::Result;
use crate::evaluation::{caa_variance, MeanStd, RegretTable};
use crate::observers::{coder_codelength, CoderId, ObserverSpec};
use crate::par;
use crate::rng::{derive_seed, stream_rng};
use crate::sources::{gen_iid, load_text, SymbolSequence};

/// License texts (GPL-3, Apache-2.0, GFDL-1.3) concatenated; plain English
/// prose with legal structure.
pub const DEFAULT_CORPUS: &[u8] = include_bytes!("../../data/corpus.txt");

pub const SOURCES: [&str; 4] = ["periodic", "noise", "text", "text_shuffled"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodelengthRow {
    pub source: String,
    pub replicate: usize,
    pub coder: CoderId,
    pub total_bits: u64,
    pub bits_per_symbol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderRow {
    pub source: String,
    pub observer_set: String,
    pub coders: Vec<CoderId>,
    /// Uniform-prior variance of excess codelength, bits^2 per symbol^2.
    pub caa: MeanStd,
    /// Mean CAA of this set minus mean CAA of the base set.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodersResult {
    pub rows: Vec<CoderRow>,
    pub codelengths: Vec<CodelengthRow>,
}

impl CodersResult {
    pub fn row(&self, source: &str, set: &str) -> Option<&CoderRow> {
        self.rows.iter().find(|r| r.source == source && r.observer_set == set)
    }
}

/// Observer sets in output order: base, base + extra, base + extra + control.
/// The control set is only scored on the periodic source.
pub fn observer_sets(cfg: &CodersConfig) -> Vec<(String, Vec<CoderId>)> {
    let base = cfg.base_set.clone();
    let mut with_extra = base.clone();
    with_extra.push(cfg.extra_coder);
    let mut with_control = with_extra.clone();
    with_control.push(cfg.control_coder);
    vec![
        ("A1".to_string(), base),
        ("A2".to_string(), with_extra),
        (format!("A2+{}", cfg.control_coder), with_control),
    ]
}

/// Byte sequence cycling through `symbols` distinct random values, each
/// repeated `run` times, from a random phase.
fn periodic_bytes(cfg: &CodersConfig, seed: u64, rep: usize) -> Result<SymbolSequence> {
    let mut rng = stream_rng(seed, "coders/periodic", rep as u64);
    let values: Vec<u8> = sample(&mut rng, 256, cfg.periodic_symbols)
        .into_iter()
        .map(|v| v as u8)
        .collect();
    let period = cfg.periodic_symbols * cfg.periodic_run;
    let phase = rng.random_range(0..period);
    let symbols = (0..cfg.n)
        .map(|t| values[((t + phase) % period) / cfg.periodic_run])
        .collect();
    SymbolSequence::from_raw(symbols, 256, "periodic_bytes")
}

fn text(cfg: &CodersConfig) -> Result<SymbolSequence> {
    match &cfg.corpus_path {
        Some(path) => load_text(path),
        None => SymbolSequence::from_raw(DEFAULT_CORPUS.to_vec(), 256, "default_corpus"),
    }
}

fn source(cfg: &CodersConfig, seed: u64, name: &str, rep: usize) -> Result<SymbolSequence> {
    match name {
        "periodic" => periodic_bytes(cfg, seed, rep),
        "noise" => gen_iid(&[1.0 / 256.0; 256], cfg.n, derive_seed(seed, "coders/noise", rep as u64)),
        "text" => text(cfg),
        "text_shuffled" => text(cfg)?.block_shuffled(cfg.shuffle_block, derive_seed(seed, "coders/shuffle", rep as u64)),
        other => unreachable!("unknown coder source {other}"),
    }
}

/// The text source is deterministic, so it is coded once.
fn replicates_for(cfg: &CodersConfig, name: &str) -> usize {
    if name == "text" {
        1
    } else {
        cfg.replicates
    }
}

pub fn run_coders(cfg: &CodersConfig, seed: u64) -> Result<CodersResult> {
    cfg.validate()?;
    let sets = observer_sets(cfg);
    let all_coders = sets.last().expect("three sets").1.clone();
    let jobs: Vec<(&str, usize)> = SOURCES
        .iter()
        .flat_map(|&s| (0..replicates_for(cfg, s)).map(move |r| (s, r)))
        .collect();
    let per_job = collect(par::map(&jobs, |&(name, rep)| {
        let seq = source(cfg, seed, name, rep)?;
        all_coders
            .iter()
            .map(|&coder| {
                let c = coder_codelength(coder, &seq)?;
                Ok(CodelengthRow {
                    source: name.to_string(),
                    replicate: rep,
                    coder,
                    total_bits: c.total_bits,
                    bits_per_symbol: c.bits_per_symbol,
                })
            })
            .collect::<Result<Vec<_>>>()
    }))?;

    let mut rows = Vec::new();
    for &name in &SOURCES {
        let runs: Vec<&Vec<CodelengthRow>> = jobs
            .iter()
            .zip(&per_job)
            .filter(|((s, _), _)| *s == name)
            .map(|(_, r)| r)
            .collect();
        let mut base_mean = None;
        // The run-length control only makes sense where runs exist.
        let n_sets = if name == "periodic" { sets.len() } else { 2 };
        for (set_name, coders) in &sets[..n_sets] {
            let caas = runs
                .iter()
                .map(|run| {
                    let losses = coders
                        .iter()
                        .map(|&c| {
                            let row = run.iter().find(|r| r.coder == c).expect("every coder ran");
                            (ObserverSpec::Coder { coder: c }, row.bits_per_symbol)
                        })
                        .collect();
                    Ok(caa_variance(&RegretTable::from_losses(losses)?, None)?.variance)
                })
                .collect::<Result<Vec<f64>>>()?;
            let caa = MeanStd::of(&caas);
            let base = *base_mean.get_or_insert(caa.mean);
            rows.push(CoderRow {
                source: name.to_string(),
                observer_set: set_name.clone(),
                coders: coders.clone(),
                caa,
                delta: caa.mean - base,
            });
        }
    }
    Ok(CodersResult {
        rows,
        codelengths: per_job.into_iter().flatten().collect(),
    })
}

impl Outputs for CodersResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let table = write_csv(
            dir,
            "coders.csv",
            OutputKind::Bars,
            &["source", "observer_set", "coders", "mean_caa", "std_caa", "delta", "replicates"],
            self.rows.iter().map(|r| {
                let names: Vec<&str> = r.coders.iter().map(|c| c.name()).collect();
                vec![
                    r.source.clone(),
                    r.observer_set.clone(),
                    names.join("+"),
                    r.caa.mean.to_string(),
                    r.caa.std.to_string(),
                    r.delta.to_string(),
                    r.caa.n.to_string(),
                ]
            }),
        )?;
        let lengths = write_csv(
            dir,
            "coders_codelengths.csv",
            OutputKind::Replicates,
            &["source", "replicate", "coder", "total_bits", "bits_per_symbol"],
            self.codelengths.iter().map(|r| {
                vec![
                    r.source.clone(),
                    r.replicate.to_string(),
                    r.coder.name().to_string(),
                    r.total_bits.to_string(),
                    r.bits_per_symbol.to_string(),
                ]
            }),
        )?;
        Ok(vec![table, lengths])
    }
}
