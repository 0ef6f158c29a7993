use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SourceDescriptor, SourceParams, SymbolSequence};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

fn check_probs(name: &'static str, probs: &[f64]) -> Result<()> {
    if !(2..=256).contains(&probs.len()) {
        return Err(Error::param(name, "alphabet size must be in 2..=256"));
    }
    if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::param(name, "probabilities must lie in [0, 1]"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::param(name, format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// `n` i.i.d. draws from `probs` over the alphabet `0..probs.len()`.
pub fn gen_iid(probs: &[f64], n: usize, seed: u64) -> Result<SymbolSequence> {
    check_probs("probs", probs)?;
    let dist = WeightedIndex::new(probs).map_err(|e| Error::param("probs", e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let symbols = (0..n).map(|_| dist.sample(&mut rng) as u8).collect();
    let meta = SourceDescriptor {
        name: "iid".into(),
        params: SourceParams::Iid {
            probs: probs.to_vec(),
        },
        seed,
    };
    SymbolSequence::new(symbols, probs.len() as u32, meta)
}

/// Loads a file verbatim, one symbol per byte (alphabet size 256).
pub fn load_text(path: &Path) -> Result<SymbolSequence> {
    let bytes = std::fs::read(path)?;
    if bytes.is_empty() {
        return Err(Error::param("path", format!("{} is empty", path.display())));
    }
    let meta = SourceDescriptor {
        name: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| "text".into()),
        params: SourceParams::Text {
            path: path.to_path_buf(),
        },
        seed: 0,
    };
    SymbolSequence::new(bytes, 256, meta)
}

/// Finite-order Markov chain. Contexts are base-`alphabet_size` integers of
/// the last `order` symbols, most recent symbol in the least significant
/// digit; `next[ctx]` is the next-symbol law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainParams {
    pub order: usize,
    pub alphabet_size: usize,
    pub next: Vec<Vec<f64>>,
}

impl MarkovChainParams {
    pub fn n_contexts(&self) -> usize {
        self.alphabet_size.pow(self.order as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.next.len() != self.n_contexts() {
            return Err(Error::param(
                "next",
                format!("expected {} context rows, got {}", self.n_contexts(), self.next.len()),
            ));
        }
        for row in &self.next {
            if row.len() != self.alphabet_size {
                return Err(Error::param("next", "row length must equal alphabet size"));
            }
            check_probs("next", row).map_err(|e| Error::NotStochastic(e.to_string()))?;
        }
        Ok(())
    }

    /// Binary order-1 chain that flips its previous symbol with probability `flip`.
    pub fn binary_flip(flip: f64) -> Self {
        MarkovChainParams {
            order: 1,
            alphabet_size: 2,
            next: vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
        }
    }

    /// Binary chain of the given order with `P(1 | ctx) = p_one[ctx]`.
    pub fn binary(order: usize, p_one: &[f64]) -> Self {
        MarkovChainParams {
            order,
            alphabet_size: 2,
            next: p_one.iter().map(|&p| vec![1.0 - p, p]).collect(),
        }
    }
}

/// Samples the chain; the first `order` symbols are uniform.
pub fn gen_markov_chain(params: &MarkovChainParams, n: usize, seed: u64) -> Result<SymbolSequence> {
    params.validate()?;
    let dists = params
        .next
        .iter()
        .map(|row| WeightedIndex::new(row).map_err(|e| Error::param("next", e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let a = params.alphabet_size;
    let n_ctx = params.n_contexts();
    let mut rng = rng_from_seed(seed);
    let mut ctx = 0usize;
    let mut symbols = Vec::with_capacity(n);
    for t in 0..n {
        let s = if t < params.order {
            rng.random_range(0..a)
        } else {
            dists[ctx].sample(&mut rng)
        };
        symbols.push(s as u8);
        ctx = (ctx * a + s) % n_ctx;
    }
    let meta = SourceDescriptor {
        name: format!("markov_order{}", params.order),
        params: SourceParams::MarkovChain {
            params: params.clone(),
        },
        seed,
    };
    SymbolSequence::new(symbols, a as u32, meta)
}
