use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{collect, write_csv, OutputFile, OutputKind, Outputs, UcurveConfig};
use crate::error::Result;
use crate::evaluation::{average_log_loss, two_alg_closed_form, MeanStd};
use crate::observers::MarkovObserver;
use crate::par;
use crate::rng::derive_seed;
use crate::sources::gen_periodic_noise_with;

/// One replicate at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcurveReplicate {
    pub pair: String,
    pub p: f64,
    pub replicate: usize,
    pub loss_low: f64,
    pub loss_high: f64,
    /// `loss_low - loss_high`.
    pub delta_l: f64,
    /// Uniform-prior two-observer CAA, `delta_l^2 / 4`.
    pub caa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcurveRow {
    pub pair: String,
    pub p: f64,
    pub delta_l: MeanStd,
    pub caa: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcurveResult {
    pub rows: Vec<UcurveRow>,
    pub replicates: Vec<UcurveReplicate>,
}

impl UcurveResult {
    pub fn rows_for(&self, pair: &str) -> impl Iterator<Item = &UcurveRow> {
        let pair = pair.to_string();
        self.rows.iter().filter(move |r| r.pair == pair)
    }
}

pub fn run_ucurve(cfg: &UcurveConfig, seed: u64) -> Result<UcurveResult> {
    cfg.validate()?;
    let b = cfg.replicates;
    let n_p = cfg.p_grid.len();
    let jobs = cfg.pairs.len() * n_p * b;
    let replicates = collect(par::map_range(jobs, |job| {
        let (pair_idx, rest) = (job / (n_p * b), job % (n_p * b));
        let (p_idx, rep) = (rest / b, rest % b);
        let pair = &cfg.pairs[pair_idx];
        let p = cfg.p_grid[p_idx];
        let label = format!("ucurve/{}/{p_idx}", pair.name);
        let seq = gen_periodic_noise_with(&pair.template, p, cfg.n, derive_seed(seed, &label, rep as u64), cfg.clock)?;
        let mut lo = MarkovObserver::new(pair.orders[0], cfg.alpha, 2)?;
        let mut hi = MarkovObserver::new(pair.orders[1], cfg.alpha, 2)?;
        let loss_low = average_log_loss(&mut lo, &seq, cfg.burn_in)?.avg_loss;
        let loss_high = average_log_loss(&mut hi, &seq, cfg.burn_in)?.avg_loss;
        let delta_l = loss_low - loss_high;
        Ok(UcurveReplicate {
            pair: pair.name.clone(),
            p,
            replicate: rep,
            loss_low,
            loss_high,
            delta_l,
            caa: two_alg_closed_form(delta_l.abs(), 0.5)?,
        })
    }))?;
    let rows = replicates
        .chunks(b)
        .map(|chunk| {
            let deltas: Vec<f64> = chunk.iter().map(|r| r.delta_l).collect();
            let caas: Vec<f64> = chunk.iter().map(|r| r.caa).collect();
            UcurveRow {
                pair: chunk[0].pair.clone(),
                p: chunk[0].p,
                delta_l: MeanStd::of(&deltas),
                caa: MeanStd::of(&caas),
            }
        })
        .collect();
    Ok(UcurveResult { rows, replicates })
}

impl Outputs for UcurveResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let summary = write_csv(
            dir,
            "ucurve.csv",
            OutputKind::Ucurve,
            &["p", "pair", "mean_delta_l", "std_delta_l", "mean_caa", "std_caa"],
            self.rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.pair.clone(),
                    r.delta_l.mean.to_string(),
                    r.delta_l.std.to_string(),
                    r.caa.mean.to_string(),
                    r.caa.std.to_string(),
                ]
            }),
        )?;
        let reps = write_csv(
            dir,
            "ucurve_replicates.csv",
            OutputKind::Replicates,
            &["p", "pair", "replicate", "loss_low", "loss_high", "delta_l", "caa"],
            self.replicates.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.pair.clone(),
                    r.replicate.to_string(),
                    r.loss_low.to_string(),
                    r.loss_high.to_string(),
                    r.delta_l.to_string(),
                    r.caa.to_string(),
                ]
            }),
        )?;
        Ok(vec![summary, reps])
    }
}
