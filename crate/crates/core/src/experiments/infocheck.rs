use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{collect, write_csv, write_json, InfocheckConfig, OutputFile, OutputKind, Outputs};
use crate::error::Result;
use crate::evaluation::average_log_loss;
use crate::infotheory::{excess_entropy_truncated, markov_chain_conditional_entropies, CmiAtomSeries};
use crate::observers::MarkovObserver;
use crate::par;
use crate::rng::derive_seed;
use crate::sources::gen_markov_chain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfocheckSourceResult {
    pub name: String,
    pub order: usize,
    pub series: CmiAtomSeries,
    /// Exact atoms of the stationary chain for `m = 1..=M`.
    pub oracle_atoms: Vec<f64>,
    pub oracle_excess_entropy: f64,
    /// Online Markov observer losses at orders `0..=M`, scored from `t = M`.
    pub online_losses: Vec<f64>,
    /// `L(order 0) - L(order M)` of the online ladder.
    pub online_advantage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfocheckResult {
    pub max_order: usize,
    pub sources: Vec<InfocheckSourceResult>,
}

impl InfocheckResult {
    pub fn source(&self, name: &str) -> Option<&InfocheckSourceResult> {
        self.sources.iter().find(|s| s.name == name)
    }
}

pub fn run_infocheck(cfg: &InfocheckConfig, seed: u64) -> Result<InfocheckResult> {
    cfg.validate()?;
    let m_max = cfg.max_order;
    let sources = collect(par::map(&cfg.sources, |src| {
        let seq = gen_markov_chain(&src.chain, cfg.n, derive_seed(seed, &format!("infocheck/{}", src.name), 0))?;
        let series = excess_entropy_truncated(&seq, m_max)?;
        let exact = markov_chain_conditional_entropies(&src.chain, m_max)?;
        let oracle_atoms: Vec<f64> = exact.windows(2).map(|w| w[0] - w[1]).collect();
        let online_losses = (0..=m_max)
            .map(|order| {
                let mut obs = MarkovObserver::new(order, cfg.alpha, src.chain.alphabet_size)?;
                Ok(average_log_loss(&mut obs, &seq, m_max)?.avg_loss)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(InfocheckSourceResult {
            name: src.name.clone(),
            order: src.chain.order,
            oracle_excess_entropy: exact[0] - exact[m_max],
            online_advantage: online_losses[0] - online_losses[m_max],
            series,
            oracle_atoms,
            online_losses,
        })
    }))?;
    Ok(InfocheckResult { max_order: m_max, sources })
}

impl Outputs for InfocheckResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let atoms = write_csv(
            dir,
            "infocheck.csv",
            OutputKind::Cdf,
            &[
                "source",
                "m",
                "atom_raw",
                "atom_clamped",
                "partial_sum",
                "oracle_atom",
                "online_delta",
                "online_cum",
            ],
            self.sources.iter().flat_map(|s| {
                let base = s.series.csv_rows(&[&s.name]);
                base.into_iter().enumerate().map(move |(i, mut row)| {
                    row.push(s.oracle_atoms[i].to_string());
                    row.push((s.online_losses[i] - s.online_losses[i + 1]).to_string());
                    row.push((s.online_losses[0] - s.online_losses[i + 1]).to_string());
                    row
                })
            }),
        )?;
        let summary: Vec<_> = self
            .sources
            .iter()
            .map(|s| {
                serde_json::json!({
                    "source": s.name,
                    "order": s.order,
                    "truncated_excess_entropy": s.series.truncated_excess_entropy,
                    "oracle_excess_entropy": s.oracle_excess_entropy,
                    "online_advantage": s.online_advantage,
                    "undersampled": s.series.undersampled(),
                })
            })
            .collect();
        let json = write_json(dir, "infocheck_summary.json", summary.len(), &summary)?;
        Ok(vec![atoms, json])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sources_small_run() {
        let cfg = InfocheckConfig {
            n: 20_000,
            max_order: 4,
            ..InfocheckConfig::default()
        };
        let res = run_infocheck(&cfg, 9).unwrap();
        assert_eq!(res.sources.len(), 4);
        let flip = res.source("flip0.1").unwrap();
        assert!((flip.oracle_excess_entropy - 0.5310).abs() < 1e-4);
        assert!((flip.series.truncated_excess_entropy - flip.oracle_excess_entropy).abs() < 0.02);
        assert!(flip.online_advantage <= flip.series.truncated_excess_entropy + 0.03);
    }
}
