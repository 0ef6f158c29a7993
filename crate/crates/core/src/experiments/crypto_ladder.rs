use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{collect, profile_header, write_csv, write_json, CryptoLadderConfig, KeySpec, OutputFile, OutputKind, Outputs};
use crate::error::Result;
use crate::evaluation::average_log_loss;
use crate::ladders::{advantage_profile, AdvantageProfile, DepthIndicators};
use crate::observers::{Fallback, ObserverSpec};
use crate::par;
use crate::rng::{derive_seed, stream_rng};
use crate::sources::{gen_xor_crypto, random_primitive_key, CryptoParams};

/// Rung `b` of the key-length ladder; `b = 0` is the uniform predictor.
pub fn crypto_rung(b: usize) -> ObserverSpec {
    if b == 0 {
        ObserverSpec::Uniform
    } else {
        ObserverSpec::Keysearch {
            max_len: b,
            fallback: Fallback::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptoKeyResult {
    pub key: String,
    pub key_len: usize,
    /// Losses averaged over replicates feed the profile.
    pub profile: AdvantageProfile,
    pub indicators: DepthIndicators,
    /// Budget with the largest clamped gain (first on ties).
    pub spike_budget: usize,
    /// Tail regret at the true key length.
    pub regret_at_key_len: f64,
    /// Largest clamped gain at any budget other than the key length.
    pub max_off_spike_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptoLadderResult {
    pub max_budget: usize,
    pub replicates: usize,
    pub keys: Vec<CryptoKeyResult>,
}

fn argmax_first(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

pub fn run_crypto_ladder(cfg: &CryptoLadderConfig, seed: u64) -> Result<CryptoLadderResult> {
    cfg.validate()?;
    let rungs = cfg.max_budget + 1;
    let b = cfg.replicates;
    // Sequences are cheap; regenerate them per job so every (key, replicate,
    // budget) triple is an independent unit of work.
    let losses = collect(par::map_range(cfg.keys.len() * b * rungs, |job| {
        let key_idx = job / (b * rungs);
        let rep = (job / rungs) % b;
        let budget = job % rungs;
        let spec = &cfg.keys[key_idx];
        let label = format!("crypto_ladder/{}", spec.label());
        let key = match spec {
            KeySpec::Bits { bits } => bits.clone(),
            KeySpec::Len { len } => random_primitive_key(*len, &mut stream_rng(seed, &format!("{label}/key"), rep as u64)),
        };
        let params = CryptoParams {
            key,
            prefix_len: cfg.prefix_len,
            reveal: cfg.reveal,
        };
        let seq = gen_xor_crypto(&params, cfg.n, derive_seed(seed, &label, rep as u64))?;
        let burn_in = params.body_start();
        let mut obs = crypto_rung(budget).build(2, burn_in)?;
        Ok(average_log_loss(obs.as_mut(), &seq, burn_in)?.avg_loss)
    }))?;

    let keys = cfg
        .keys
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let block = &losses[k * b * rungs..(k + 1) * b * rungs];
            let mean: Vec<f64> = (0..rungs)
                .map(|budget| (0..b).map(|rep| block[rep * rungs + budget]).sum::<f64>() / b as f64)
                .collect();
            let profile = advantage_profile(&mean)?;
            let indicators = DepthIndicators::of(&profile, cfg.tail_alpha)?;
            let m = spec.len();
            let max_off_spike_delta = profile
                .deltas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != m)
                .map(|(_, &d)| d)
                .fold(0.0, f64::max);
            Ok(CryptoKeyResult {
                key: spec.label(),
                key_len: m,
                spike_budget: argmax_first(&profile.deltas) + 1,
                regret_at_key_len: profile.tail_regret[m],
                max_off_spike_delta,
                indicators,
                profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CryptoLadderResult {
        max_budget: cfg.max_budget,
        replicates: b,
        keys,
    })
}

impl Outputs for CryptoLadderResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let profile = write_csv(
            dir,
            "crypto_ladder_profile.csv",
            OutputKind::Ladder,
            &profile_header("key"),
            self.keys.iter().flat_map(|k| k.profile.csv_rows(&[&k.key])),
        )?;
        let summary: Vec<_> = self
            .keys
            .iter()
            .map(|k| {
                serde_json::json!({
                    "key": k.key,
                    "key_len": k.key_len,
                    "spike_budget": k.spike_budget,
                    "regret_at_key_len": k.regret_at_key_len,
                    "max_off_spike_delta": k.max_off_spike_delta,
                    "indicators": k.indicators,
                })
            })
            .collect();
        let json = write_json(dir, "crypto_ladder_indicators.json", summary.len(), &summary)?;
        Ok(vec![profile, json])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_key_spikes_at_first_budget() {
        let cfg = CryptoLadderConfig {
            n: 4000,
            replicates: 2,
            max_budget: 6,
            keys: vec![KeySpec::Bits { bits: vec![0] }, KeySpec::Len { len: 4 }],
            ..CryptoLadderConfig::default()
        };
        let res = run_crypto_ladder(&cfg, 5).unwrap();
        let zero = &res.keys[0];
        assert_eq!(zero.spike_budget, 1);
        assert!((zero.indicators.depth_score.unwrap() - 1.0 / 6.0).abs() < 1e-3);
        let four = &res.keys[1];
        assert_eq!(four.spike_budget, 4);
        assert!(four.regret_at_key_len < 0.05);
        assert_eq!(four.profile.losses[0], 1.0);
    }

    #[test]
    fn key_longer_than_ladder_is_rejected() {
        let cfg = CryptoLadderConfig {
            max_budget: 4,
            keys: vec![KeySpec::Len { len: 8 }],
            ..CryptoLadderConfig::default()
        };
        assert!(run_crypto_ladder(&cfg, 1).is_err());
    }
}
