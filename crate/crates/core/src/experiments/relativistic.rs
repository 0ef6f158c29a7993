use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{collect, write_csv, OutputFile, OutputKind, Outputs, RelativisticConfig};
use crate::error::Result;
use crate::evaluation::{average_log_loss, caa_max, regret_table, MeanStd};
use crate::observers::{Fallback, ObserverSpec};
use crate::par;
use crate::rng::{derive_seed, stream_rng};
use crate::sources::{gen_hmm, gen_xor_crypto, random_key, CryptoParams, SymbolSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Stat,
    Search,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Stat => "stat",
            Family::Search => "search",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativisticReplicate {
    pub source: String,
    pub family: Family,
    pub replicate: usize,
    pub loss_naive: f64,
    pub loss_sophisticated: f64,
    /// Max-gap CAA of the two-member family.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativisticRow {
    pub source: String,
    /// Key length for crypto sources.
    pub key_len: Option<usize>,
    pub family: Family,
    pub gap: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativisticResult {
    pub rows: Vec<RelativisticRow>,
    pub replicates: Vec<RelativisticReplicate>,
}

impl RelativisticResult {
    pub fn gap(&self, source: &str, family: Family) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.source == source && r.family == family)
            .map(|r| r.gap.mean)
    }
}

pub fn crypto_source_name(m: usize) -> String {
    format!("crypto_m{m}")
}

fn family_members(cfg: &RelativisticConfig, family: Family) -> [ObserverSpec; 2] {
    let naive = ObserverSpec::Markov {
        order: cfg.stat_orders[0],
        alpha: cfg.alpha,
    };
    let soph = match family {
        Family::Stat => ObserverSpec::Markov {
            order: cfg.stat_orders[1],
            alpha: cfg.alpha,
        },
        Family::Search => ObserverSpec::Keysearch {
            max_len: cfg.search_max_len,
            fallback: Fallback::Markov {
                order: cfg.stat_orders[1],
                alpha: cfg.alpha,
            },
        },
    };
    [naive, soph]
}

fn score(
    cfg: &RelativisticConfig,
    source: &str,
    rep: usize,
    seq: &SymbolSequence,
    burn_in: usize,
) -> Result<Vec<RelativisticReplicate>> {
    [Family::Stat, Family::Search]
        .into_iter()
        .map(|family| {
            let reports = family_members(cfg, family)
                .iter()
                .map(|spec| average_log_loss(spec.build(2, burn_in)?.as_mut(), seq, burn_in))
                .collect::<Result<Vec<_>>>()?;
            let table = regret_table(&reports)?;
            Ok(RelativisticReplicate {
                source: source.to_string(),
                family,
                replicate: rep,
                loss_naive: reports[0].avg_loss,
                loss_sophisticated: reports[1].avg_loss,
                gap: caa_max(&table),
            })
        })
        .collect()
}

pub fn run_relativistic(cfg: &RelativisticConfig, seed: u64) -> Result<RelativisticResult> {
    cfg.validate()?;
    let b = cfg.replicates;
    // Source 0 is the HMM, then one crypto source per key length.
    let n_sources = 1 + cfg.key_lens.len();
    let per_job = collect(par::map_range(n_sources * b, |job| {
        let (src, rep) = (job / b, job % b);
        if src == 0 {
            let seq = gen_hmm(&cfg.hmm.params(), cfg.n, derive_seed(seed, "relativistic/hmm", rep as u64))?;
            score(cfg, "hmm", rep, &seq, cfg.hmm_burn_in)
        } else {
            let m = cfg.key_lens[src - 1];
            let name = crypto_source_name(m);
            let mut key_rng = stream_rng(seed, &format!("relativistic/{name}/key"), rep as u64);
            let params = CryptoParams {
                key: random_key(m, &mut key_rng),
                prefix_len: cfg.prefix_len,
                reveal: cfg.reveal,
            };
            let seq = gen_xor_crypto(&params, cfg.n, derive_seed(seed, &format!("relativistic/{name}"), rep as u64))?;
            score(cfg, &name, rep, &seq, params.body_start())
        }
    }))?;
    let replicates: Vec<RelativisticReplicate> = per_job.into_iter().flatten().collect();

    let mut rows = Vec::new();
    for src in 0..n_sources {
        let (source, key_len) = if src == 0 {
            ("hmm".to_string(), None)
        } else {
            let m = cfg.key_lens[src - 1];
            (crypto_source_name(m), Some(m))
        };
        for family in [Family::Stat, Family::Search] {
            let gaps: Vec<f64> = replicates
                .iter()
                .filter(|r| r.source == source && r.family == family)
                .map(|r| r.gap)
                .collect();
            rows.push(RelativisticRow {
                source: source.clone(),
                key_len,
                family,
                gap: MeanStd::of(&gaps),
            });
        }
    }
    Ok(RelativisticResult { rows, replicates })
}

impl Outputs for RelativisticResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let summary = write_csv(
            dir,
            "relativistic.csv",
            OutputKind::Bars,
            &["source", "key_len", "observer_family", "mean_gap", "std_gap", "replicates"],
            self.rows.iter().map(|r| {
                vec![
                    r.source.clone(),
                    super::opt_cell(r.key_len),
                    r.family.name().to_string(),
                    r.gap.mean.to_string(),
                    r.gap.std.to_string(),
                    r.gap.n.to_string(),
                ]
            }),
        )?;
        let reps = write_csv(
            dir,
            "relativistic_replicates.csv",
            OutputKind::Replicates,
            &["source", "observer_family", "replicate", "loss_naive", "loss_sophisticated", "gap"],
            self.replicates.iter().map(|r| {
                vec![
                    r.source.clone(),
                    r.family.name().to_string(),
                    r.replicate.to_string(),
                    r.loss_naive.to_string(),
                    r.loss_sophisticated.to_string(),
                    r.gap.to_string(),
                ]
            }),
        )?;
        Ok(vec![summary, reps])
    }
}
