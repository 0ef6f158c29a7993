//! Observers: online predictors scored by log-loss, and lossless coders
//! scored by codelength.

mod ca;
pub mod coders;
mod keysearch;
mod markov;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ca::{CaObserver, DEFAULT_ENUMERATE_MAX_MISSING, DEFAULT_SAMPLES};
pub use coders::{coder_codelength, CoderId, Codelength};
pub use keysearch::{Fallback, KeySearchObserver};
pub use markov::{MarkovObserver, MAX_CONTEXT_TABLE};

/// Probability floor used by deterministic predictors.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Next-symbol law over the alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveDistribution {
    probs: Vec<f64>,
}

impl PredictiveDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::param("probs", "need at least two outcomes"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::param("probs", "entries must be finite and nonnegative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::param("probs", format!("sums to {sum}")));
        }
        Ok(PredictiveDistribution { probs })
    }

    pub fn uniform(alphabet_size: usize) -> Self {
        PredictiveDistribution {
            probs: vec![1.0 / alphabet_size as f64; alphabet_size],
        }
    }

    /// All mass on `symbol` except `epsilon` spread over the rest.
    pub fn near_point_mass(alphabet_size: usize, symbol: u8, epsilon: f64) -> Self {
        let other = epsilon / (alphabet_size - 1) as f64;
        let mut probs = vec![other; alphabet_size];
        probs[usize::from(symbol)] = 1.0 - epsilon;
        PredictiveDistribution { probs }
    }

    /// Floors every entry at `epsilon` and renormalises.
    pub fn floored(weights: &[f64], epsilon: f64) -> Self {
        let total: f64 = weights.iter().sum();
        let mut probs: Vec<f64> = weights.iter().map(|w| (w / total).max(epsilon)).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        PredictiveDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: u8) -> f64 {
        self.probs[usize::from(symbol)]
    }

    pub fn log_loss(&self, symbol: u8) -> f64 {
        -self.prob(symbol).log2()
    }

    pub fn is_valid(&self) -> bool {
        (self.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9 && self.probs.iter().all(|&p| p > 0.0)
    }
}

/// Serializable description of an observer. `budget()` gives the rung of
/// the ladder it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObserverSpec {
    Uniform,
    Markov { order: usize, alpha: f64 },
    Keysearch { max_len: usize, fallback: Fallback },
    CaSim { rule: u8, radius: usize, horizon: usize },
    Coder { coder: CoderId },
}

impl ObserverSpec {
    pub fn budget(&self) -> usize {
        match self {
            ObserverSpec::Uniform => 0,
            ObserverSpec::Markov { order, .. } => *order,
            ObserverSpec::Keysearch { max_len, .. } => *max_len,
            ObserverSpec::CaSim { radius, .. } => *radius,
            ObserverSpec::Coder { coder } => *coder as usize,
        }
    }

    /// Short stable label used in CSV output.
    pub fn label(&self) -> String {
        match self {
            ObserverSpec::Uniform => "uniform".into(),
            ObserverSpec::Markov { order, .. } => format!("markov{order}"),
            ObserverSpec::Keysearch { max_len, .. } => format!("keysearch{max_len}"),
            ObserverSpec::CaSim { rule, radius, .. } => format!("ca{rule}_r{radius}"),
            ObserverSpec::Coder { coder } => coder.name().into(),
        }
    }

    /// Builds a fresh sequential predictor. `body_start` is the alignment
    /// hint for key searchers. CA simulators and coders are not sequential.
    pub fn build(&self, alphabet_size: usize, body_start: usize) -> Result<Box<dyn SequentialObserver>> {
        match self {
            ObserverSpec::Uniform => Ok(Box::new(UniformObserver::new(alphabet_size))),
            ObserverSpec::Markov { order, alpha } => {
                Ok(Box::new(MarkovObserver::new(*order, *alpha, alphabet_size)?))
            }
            ObserverSpec::Keysearch { max_len, fallback } => Ok(Box::new(KeySearchObserver::new(
                *max_len,
                body_start,
                fallback.clone(),
            )?)),
            ObserverSpec::CaSim { .. } | ObserverSpec::Coder { .. } => Err(Error::param(
                "observer",
                format!("{} is not a sequential predictor", self.label()),
            )),
        }
    }
}

/// An online predictor: `predict` the next symbol, then `update` with the
/// realised one.
pub trait SequentialObserver: Send {
    fn spec(&self) -> ObserverSpec;
    fn alphabet_size(&self) -> usize;
    fn predict(&self) -> PredictiveDistribution;
    /// Probability of `symbol` under the current prediction.
    fn prob(&self, symbol: u8) -> f64 {
        self.predict().prob(symbol)
    }
    fn update(&mut self, symbol: u8);
}

/// Budget-zero rung: ignores the data.
#[derive(Debug, Clone)]
pub struct UniformObserver {
    alphabet_size: usize,
}

impl UniformObserver {
    pub fn new(alphabet_size: usize) -> Self {
        UniformObserver { alphabet_size }
    }
}

impl SequentialObserver for UniformObserver {
    fn spec(&self) -> ObserverSpec {
        ObserverSpec::Uniform
    }
    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
    fn predict(&self) -> PredictiveDistribution {
        PredictiveDistribution::uniform(self.alphabet_size)
    }
    fn prob(&self, _symbol: u8) -> f64 {
        1.0 / self.alphabet_size as f64
    }
    fn update(&mut self, _symbol: u8) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_validation() {
        assert!(PredictiveDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(PredictiveDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(PredictiveDistribution::new(vec![1.0]).is_err());
        assert!(PredictiveDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn floored_is_positive_and_normalised() {
        let d = PredictiveDistribution::floored(&[0.0, 3.0], 1e-6);
        assert!(d.is_valid());
        assert!(d.prob(0) > 0.0 && d.prob(0) < 1.1e-6);
    }

    #[test]
    fn spec_serde_round_trip() {
        let specs = vec![
            ObserverSpec::Uniform,
            ObserverSpec::Markov { order: 3, alpha: 1.0 },
            ObserverSpec::Keysearch {
                max_len: 16,
                fallback: Fallback::Markov { order: 3, alpha: 1.0 },
            },
            ObserverSpec::CaSim { rule: 110, radius: 4, horizon: 20 },
            ObserverSpec::Coder { coder: CoderId::Huffman0 },
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let back: ObserverSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn non_sequential_specs_do_not_build() {
        assert!(ObserverSpec::Coder { coder: CoderId::Rle }.build(2, 0).is_err());
        assert!(ObserverSpec::Uniform.build(2, 0).is_ok());
    }
}
