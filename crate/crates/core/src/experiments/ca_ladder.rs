use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{collect, profile_header, write_csv, write_json, CaLadderConfig, OutputFile, OutputKind, Outputs};
use crate::error::Result;
use crate::ladders::{advantage_profile, AdvantageProfile, DepthIndicators};
use crate::observers::CaObserver;
use crate::par;
use crate::rng::{derive_seed, stream_rng};
use crate::sources::{gen_eca, EcaSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaRuleResult {
    pub rule: u32,
    /// Per replicate, losses at radii `0..=max_radius` averaged over instances.
    pub replicate_losses: Vec<Vec<f64>>,
    pub profile: AdvantageProfile,
    pub indicators: DepthIndicators,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaLadderResult {
    pub horizon: usize,
    pub max_radius: usize,
    pub instances: usize,
    pub replicates: usize,
    pub rules: Vec<CaRuleResult>,
}

impl CaLadderResult {
    pub fn rule(&self, rule: u32) -> Option<&CaRuleResult> {
        self.rules.iter().find(|r| r.rule == rule)
    }
}

/// Mean log-loss of radius `r` over every instance of one automaton run.
/// Radius 0 is the uniform predictor.
fn radius_loss(cfg: &CaLadderConfig, seed: u64, rule: u32, rep: usize, r: usize) -> Result<f64> {
    if r == 0 {
        return Ok(1.0);
    }
    let spec = EcaSpec {
        rule,
        width: cfg.width(),
        steps: cfg.horizon,
        boundary: Default::default(),
    };
    let run = gen_eca(&spec, derive_seed(seed, &format!("ca_ladder/{rule}"), rep as u64))?;
    let obs = CaObserver::new(rule as u8, r, cfg.horizon)?
        .with_enumeration_threshold(cfg.enumerate_max_missing)
        .with_samples(cfg.samples)?;
    let instances = run.instances(r);
    let label = format!("ca_ladder/{rule}/{rep}/r{r}");
    let mut total = 0.0;
    for (i, inst) in instances.iter().take(cfg.instances).enumerate() {
        let mut rng = stream_rng(seed, &label, i as u64);
        total += obs.predict(&inst.window, &mut rng)?.log_loss(inst.target);
    }
    Ok(total / cfg.instances as f64)
}

pub fn run_ca_ladder(cfg: &CaLadderConfig, seed: u64) -> Result<CaLadderResult> {
    cfg.validate()?;
    let rungs = cfg.max_radius + 1;
    let b = cfg.replicates;
    let losses = collect(par::map_range(cfg.rules.len() * b * rungs, |job| {
        let rule = cfg.rules[job / (b * rungs)];
        let rep = (job / rungs) % b;
        radius_loss(cfg, seed, rule, rep, job % rungs)
    }))?;
    let rules = cfg
        .rules
        .iter()
        .enumerate()
        .map(|(k, &rule)| {
            let replicate_losses: Vec<Vec<f64>> = losses[k * b * rungs..(k + 1) * b * rungs]
                .chunks(rungs)
                .map(|c| c.to_vec())
                .collect();
            let mean: Vec<f64> = (0..rungs)
                .map(|r| replicate_losses.iter().map(|l| l[r]).sum::<f64>() / b as f64)
                .collect();
            let profile = advantage_profile(&mean)?;
            let indicators = DepthIndicators::of(&profile, cfg.tail_alpha)?;
            Ok(CaRuleResult {
                rule,
                replicate_losses,
                profile,
                indicators,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CaLadderResult {
        horizon: cfg.horizon,
        max_radius: cfg.max_radius,
        instances: cfg.instances,
        replicates: b,
        rules,
    })
}

impl Outputs for CaLadderResult {
    fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        let profile = write_csv(
            dir,
            "ca_ladder_profile.csv",
            OutputKind::Ladder,
            &profile_header("rule"),
            self.rules.iter().flat_map(|r| r.profile.csv_rows(&[&r.rule.to_string()])),
        )?;
        let table: Vec<_> = self
            .rules
            .iter()
            .map(|r| {
                serde_json::json!({
                    "rule": r.rule,
                    "horizon": self.horizon,
                    "tail_frac": r.indicators.tail_frac,
                    "half_mass_budget": r.indicators.half_mass_budget,
                    "depth_score": r.indicators.depth_score,
                    "total_mass": r.indicators.total_mass,
                    "alpha": r.indicators.alpha,
                    "defined": r.indicators.defined,
                })
            })
            .collect();
        let json = write_json(dir, "ca_ladder_indicators.json", table.len(), &table)?;
        Ok(vec![profile, json])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rules: Vec<u32>) -> CaLadderConfig {
        CaLadderConfig {
            rules,
            horizon: 6,
            max_radius: 6,
            instances: 200,
            ..CaLadderConfig::default()
        }
    }

    #[test]
    fn rule_90_gains_only_at_full_cone() {
        let res = run_ca_ladder(&small(vec![90]), 3).unwrap();
        let r = &res.rules[0];
        // Every radius below the horizon leaves the target a fair coin.
        for &l in &r.profile.losses[..6] {
            assert!((l - 1.0).abs() < 1e-4, "{l}");
        }
        assert!(r.profile.losses[6] < 1e-4);
        assert_eq!(r.indicators.half_mass_budget, Some(6));
        assert!((r.indicators.depth_score.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_rule_is_learned_at_radius_one() {
        let res = run_ca_ladder(&small(vec![0]), 3).unwrap();
        let r = &res.rules[0];
        assert!(r.profile.deltas[1..].iter().all(|&d| d < 1e-9));
        assert!((r.indicators.depth_score.unwrap() - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn too_narrow_is_rejected() {
        let mut cfg = small(vec![90]);
        cfg.width = Some(10);
        assert!(run_ca_ladder(&cfg, 1).is_err());
    }
}
