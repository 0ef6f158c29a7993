use super::{ObserverSpec, PredictiveDistribution, SequentialObserver};
use crate::error::{Error, Result};

/// Largest number of contexts an order-k table may hold.
pub const MAX_CONTEXT_TABLE: usize = 1 << 26;

/// Online order-k predictor with additive (Laplace for α = 1) smoothing:
/// `P(x | ctx) = (count(ctx, x) + α) / (count(ctx) + α·|Σ|)`.
///
/// Before `k` symbols have been seen the missing history reads as zeros.
#[derive(Debug, Clone)]
pub struct MarkovObserver {
    order: usize,
    alpha: f64,
    alphabet_size: usize,
    n_contexts: usize,
    ctx: usize,
    counts: Vec<u32>,
    totals: Vec<u32>,
}

impl MarkovObserver {
    pub fn new(order: usize, alpha: f64, alphabet_size: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{alpha} must be positive")));
        }
        if alphabet_size < 2 {
            return Err(Error::param("alphabet_size", "need at least two symbols"));
        }
        let n_contexts = u32::try_from(order)
            .ok()
            .and_then(|k| alphabet_size.checked_pow(k))
            .filter(|&c| c <= MAX_CONTEXT_TABLE)
            .ok_or_else(|| {
                Error::param(
                    "order",
                    format!("{alphabet_size}^{order} contexts exceed the 2^26 table cap"),
                )
            })?;
        Ok(MarkovObserver {
            order,
            alpha,
            alphabet_size,
            n_contexts,
            ctx: 0,
            counts: vec![0; n_contexts * alphabet_size],
            totals: vec![0; n_contexts],
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl SequentialObserver for MarkovObserver {
    fn spec(&self) -> ObserverSpec {
        ObserverSpec::Markov {
            order: self.order,
            alpha: self.alpha,
        }
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn predict(&self) -> PredictiveDistribution {
        let base = self.ctx * self.alphabet_size;
        let denom = f64::from(self.totals[self.ctx]) + self.alpha * self.alphabet_size as f64;
        let probs = self.counts[base..base + self.alphabet_size]
            .iter()
            .map(|&c| (f64::from(c) + self.alpha) / denom)
            .collect();
        PredictiveDistribution::new(probs).expect("smoothed counts form a distribution")
    }

    fn prob(&self, symbol: u8) -> f64 {
        let c = self.counts[self.ctx * self.alphabet_size + usize::from(symbol)];
        (f64::from(c) + self.alpha)
            / (f64::from(self.totals[self.ctx]) + self.alpha * self.alphabet_size as f64)
    }

    fn update(&mut self, symbol: u8) {
        let s = usize::from(symbol);
        self.counts[self.ctx * self.alphabet_size + s] += 1;
        self.totals[self.ctx] += 1;
        self.ctx = (self.ctx * self.alphabet_size + s) % self.n_contexts;
    }
}
