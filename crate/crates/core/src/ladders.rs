//! Budget ladders: advantage profiles and scalar depth indicators.
//!
//! A ladder is a sequence of observers `A^(0), ..., A^(B)` with growing
//! resources. `A^(0)` is the uniform predictor by convention.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TAIL_ALPHA: f64 = 2.0 / 3.0;

/// Absorbs rounding in `alpha * B` (2/3 * 9 evaluates to 5.999...).
const FLOOR_SLACK: f64 = 1e-9;

/// Relative slack for the half-mass comparison.
const HALF_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageProfile {
    /// `1..=B`.
    pub budgets: Vec<usize>,
    /// `L(A^(b))` for `b = 0..=B`.
    pub losses: Vec<f64>,
    /// `L(A^(b-1)) - L(A^(b))`, indexed like `budgets`.
    pub deltas_raw: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Running sum of clamped deltas.
    pub cum_mass: Vec<f64>,
    /// `L(A^(b)) - min L` for `b = 0..=B`.
    pub tail_regret_raw: Vec<f64>,
    /// Same with losses replaced by their running minimum, so it never rises.
    pub tail_regret: Vec<f64>,
    /// Sum of clamped deltas; the indicators divide by this.
    pub total_mass: f64,
    /// `L(A^(0)) - L(A^(B))`.
    pub total_mass_raw: f64,
}

/// Builds the profile from losses at budgets `0..=B`.
pub fn advantage_profile(losses_by_budget: &[f64]) -> Result<AdvantageProfile> {
    if losses_by_budget.len() < 2 {
        return Err(Error::param("losses_by_budget", "need at least budgets 0 and 1"));
    }
    if losses_by_budget.iter().any(|l| !l.is_finite()) {
        return Err(Error::param("losses_by_budget", "losses must be finite"));
    }
    let losses = losses_by_budget.to_vec();
    let big_b = losses.len() - 1;
    let deltas_raw: Vec<f64> = losses.windows(2).map(|w| w[0] - w[1]).collect();
    let deltas: Vec<f64> = deltas_raw.iter().map(|d| d.max(0.0)).collect();
    let cum_mass: Vec<f64> = deltas
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    let l_min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_regret_raw = losses.iter().map(|l| l - l_min).collect();
    let mut running = f64::INFINITY;
    let tail_regret = losses
        .iter()
        .map(|&l| {
            running = running.min(l);
            running - l_min
        })
        .collect();
    Ok(AdvantageProfile {
        budgets: (1..=big_b).collect(),
        total_mass: cum_mass[big_b - 1],
        total_mass_raw: losses[0] - losses[big_b],
        losses,
        deltas_raw,
        deltas,
        cum_mass,
        tail_regret_raw,
        tail_regret,
    })
}

impl AdvantageProfile {
    /// Largest budget `B`.
    pub fn max_budget(&self) -> usize {
        self.budgets.len()
    }

    pub fn has_mass(&self) -> bool {
        self.total_mass > 0.0
    }

    /// CSV columns: budget, loss, delta_raw, delta_clamped, cum_mass, tail_regret.
    /// Budget 0 has empty delta cells and zero cumulative mass.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PROFILE_COLUMNS)?;
        for row in self.csv_rows(&[]) {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rows in [`PROFILE_COLUMNS`] order with leading key cells, for files
    /// that hold several profiles.
    pub fn csv_rows(&self, keys: &[&str]) -> Vec<Vec<String>> {
        (0..=self.max_budget())
            .map(|b| {
                let mut row: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
                row.push(b.to_string());
                row.push(self.losses[b].to_string());
                if b == 0 {
                    row.extend([String::new(), String::new(), "0".into()]);
                } else {
                    row.push(self.deltas_raw[b - 1].to_string());
                    row.push(self.deltas[b - 1].to_string());
                    row.push(self.cum_mass[b - 1].to_string());
                }
                row.push(self.tail_regret[b].to_string());
                row
            })
            .collect()
    }
}

pub const PROFILE_COLUMNS: [&str; 6] = ["budget", "loss", "delta_raw", "delta_clamped", "cum_mass", "tail_regret"];

/// Share of mass at budgets above `floor(alpha * B)`; `None` when `M = 0`.
pub fn tail_frac(profile: &AdvantageProfile, alpha: f64) -> Result<Option<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("{alpha} outside (0, 1)")));
    }
    if !profile.has_mass() {
        return Ok(None);
    }
    let cut = (alpha * profile.max_budget() as f64 + FLOOR_SLACK).floor() as usize;
    let tail: f64 = profile.deltas[cut..].iter().sum();
    Ok(Some(tail / profile.total_mass))
}

/// Smallest budget whose cumulative mass reaches `M / 2`.
pub fn half_mass_budget(profile: &AdvantageProfile) -> Option<usize> {
    if !profile.has_mass() {
        return None;
    }
    let half = profile.total_mass / 2.0;
    let slack = HALF_MASS_TOL * profile.total_mass;
    profile
        .cum_mass
        .iter()
        .position(|&c| c >= half - slack)
        .map(|i| profile.budgets[i])
}

/// `(1/B) * sum_b b * dL_b / M`, in `[1/B, 1]`.
pub fn depth_score(profile: &AdvantageProfile) -> Option<f64> {
    if !profile.has_mass() {
        return None;
    }
    let weighted: f64 = profile
        .budgets
        .iter()
        .zip(&profile.deltas)
        .map(|(&b, &d)| b as f64 * d)
        .sum();
    Some(weighted / (profile.max_budget() as f64 * profile.total_mass))
}

/// Scalar summary of a profile. Fields are `None` when the profile has no mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthIndicators {
    pub alpha: f64,
    pub tail_frac: Option<f64>,
    pub half_mass_budget: Option<usize>,
    pub depth_score: Option<f64>,
    pub total_mass: f64,
    pub max_budget: usize,
    pub defined: bool,
}

impl DepthIndicators {
    pub fn of(profile: &AdvantageProfile, alpha: f64) -> Result<Self> {
        Ok(DepthIndicators {
            alpha,
            tail_frac: tail_frac(profile, alpha)?,
            half_mass_budget: half_mass_budget(profile),
            depth_score: depth_score(profile),
            total_mass: profile.total_mass,
            max_budget: profile.max_budget(),
            defined: profile.has_mass(),
        })
    }
}
