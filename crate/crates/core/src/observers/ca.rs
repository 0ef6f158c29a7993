use rand::Rng;

use super::{ObserverSpec, PredictiveDistribution, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::sources::rule_table;

/// Completions are enumerated exhaustively up to this many unseen cells.
pub const DEFAULT_ENUMERATE_MAX_MISSING: usize = 12;
/// Monte Carlo completions drawn above the enumeration threshold.
pub const DEFAULT_SAMPLES: usize = 512;
/// Light cones are packed into one `u64`.
const MAX_HORIZON: usize = 31;

/// Local simulator: sees the initial row within `radius` of a target
/// column, fills the rest of the depth-`horizon` light cone with fair coin
/// flips, runs the automaton, and reports the empirical law of the target
/// cell.
#[derive(Debug, Clone)]
pub struct CaObserver {
    rule: u8,
    radius: usize,
    requested_radius: usize,
    horizon: usize,
    /// Rule-table patterns (`l << 2 | c << 1 | r`) that map to 1.
    live_patterns: Vec<u8>,
    enumerate_max_missing: usize,
    samples: usize,
    epsilon: f64,
}

impl CaObserver {
    /// A radius beyond the horizon is clamped: cells outside the light cone
    /// cannot influence the target.
    pub fn new(rule: u8, radius: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon > MAX_HORIZON {
            return Err(Error::param("horizon", format!("{horizon} not in 1..={MAX_HORIZON}")));
        }
        let table = rule_table(rule);
        Ok(CaObserver {
            rule,
            radius: radius.min(horizon),
            requested_radius: radius,
            horizon,
            live_patterns: (0..8u8).filter(|&p| table[usize::from(p)] == 1).collect(),
            enumerate_max_missing: DEFAULT_ENUMERATE_MAX_MISSING,
            samples: DEFAULT_SAMPLES,
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn with_enumeration_threshold(mut self, max_missing: usize) -> Self {
        self.enumerate_max_missing = max_missing.min(40);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples < DEFAULT_SAMPLES {
            return Err(Error::param("samples", format!("at least {DEFAULT_SAMPLES} required")));
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn spec(&self) -> ObserverSpec {
        ObserverSpec::CaSim {
            rule: self.rule,
            radius: self.radius,
            horizon: self.horizon,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Unseen cells inside the light cone.
    pub fn missing_cells(&self) -> usize {
        2 * (self.horizon - self.radius)
    }

    pub fn enumerates(&self) -> bool {
        self.missing_cells() <= self.enumerate_max_missing
    }

    fn step(&self, x: u64) -> u64 {
        let l = x << 1;
        let r = x >> 1;
        let pick = |v: u64, on: bool| if on { v } else { !v };
        self.live_patterns.iter().fold(0, |acc, &p| {
            acc | (pick(l, p & 4 != 0) & pick(x, p & 2 != 0) & pick(r, p & 1 != 0))
        })
    }

    /// Target cell after `horizon` steps of a packed light cone
    /// (bit i = offset i - horizon).
    pub fn simulate(&self, cone: u64) -> u8 {
        let mut x = cone;
        for _ in 0..self.horizon {
            x = self.step(x);
        }
        ((x >> self.horizon) & 1) as u8
    }

    /// Predicts the target from an initial-row window of the requested
    /// radius (length `2 * radius + 1`). `rng` is only used when sampling.
    pub fn predict<R: Rng + ?Sized>(&self, window: &[u8], rng: &mut R) -> Result<PredictiveDistribution> {
        if window.len() != 2 * self.requested_radius + 1 {
            return Err(Error::param(
                "window",
                format!("length {} != 2 * {} + 1", window.len(), self.requested_radius),
            ));
        }
        let k = self.horizon;
        let r = self.radius;
        let skip = self.requested_radius - r;
        let mut observed = 0u64;
        for (i, &b) in window[skip..skip + 2 * r + 1].iter().enumerate() {
            observed |= u64::from(b & 1) << (k - r + i);
        }
        let side = k - r;
        let side_mask = (1u64 << side) - 1;
        let right_shift = k + r + 1;
        let cone = |code: u64| observed | (code & side_mask) | ((code >> side) << right_shift);

        let (ones, total) = if self.enumerates() {
            let count = 1u64 << (2 * side);
            let ones: u64 = (0..count).map(|c| u64::from(self.simulate(cone(c)))).sum();
            (ones, count)
        } else {
            let full = (1u64 << (2 * side)) - 1;
            let ones: u64 = (0..self.samples)
                .map(|_| u64::from(self.simulate(cone(rng.random::<u64>() & full))))
                .sum();
            (ones, self.samples as u64)
        };
        let q = ones as f64 / total as f64;
        Ok(PredictiveDistribution::floored(&[1.0 - q, q], self.epsilon))
    }
}
