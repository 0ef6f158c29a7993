use serde::{Deserialize, Serialize};

use super::{MarkovObserver, ObserverSpec, PredictiveDistribution, SequentialObserver, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::sources::lcm;

/// What a key searcher predicts while no key hypothesis is validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fallback {
    Uniform,
    Markov { order: usize, alpha: f64 },
}

impl Default for Fallback {
    fn default() -> Self {
        Fallback::Markov { order: 3, alpha: 1.0 }
    }
}

#[derive(Debug, Clone)]
enum FallbackModel {
    Uniform,
    Markov(MarkovObserver),
}

impl FallbackModel {
    fn prob(&self, symbol: u8) -> f64 {
        match self {
            FallbackModel::Uniform => 0.5,
            FallbackModel::Markov(m) => m.prob(symbol),
        }
    }

    fn update(&mut self, symbol: u8) {
        if let FallbackModel::Markov(m) = self {
            m.update(symbol);
        }
    }
}

/// Known-plaintext searcher for repeating-key XOR over an alternating
/// plaintext, restricted to key lengths `1..=max_len`.
///
/// Hypothesis ℓ reads its key off the first ℓ body symbols
/// (`key[j] = c_j XOR (j mod 2)`), dies at the first inconsistent symbol,
/// and counts as validated once ℓ + lcm(2, ℓ) body symbols agree with it.
/// The shortest validated hypothesis predicts deterministically (mass
/// `1 - ε` on the decrypted-and-re-encrypted bit); otherwise the fallback
/// predicts. The fallback sees every symbol, so with no validated key the
/// searcher is exactly its fallback.
#[derive(Debug, Clone)]
pub struct KeySearchObserver {
    max_len: usize,
    body_start: usize,
    fallback_spec: Fallback,
    fallback: FallbackModel,
    epsilon: f64,
    seen: usize,
    body: Vec<u8>,
    /// Hypothesis lengths still consistent with the body, ascending.
    alive: Vec<usize>,
}

impl KeySearchObserver {
    /// `body_start` is the index of the first ciphertext symbol; the
    /// plaintext phase is counted from there.
    pub fn new(max_len: usize, body_start: usize, fallback: Fallback) -> Result<Self> {
        let model = match &fallback {
            Fallback::Uniform => FallbackModel::Uniform,
            Fallback::Markov { order, alpha } => {
                FallbackModel::Markov(MarkovObserver::new(*order, *alpha, 2)?)
            }
        };
        Ok(KeySearchObserver {
            max_len,
            body_start,
            fallback_spec: fallback,
            fallback: model,
            epsilon: DEFAULT_EPSILON,
            seen: 0,
            body: Vec::new(),
            alive: (1..=max_len).collect(),
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::param("epsilon", "must lie in (0, 0.5)"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Bit that hypothesis `len` expects at body index `j` (`j >= len`).
    fn expected(&self, len: usize, j: usize) -> u8 {
        let i = j % len;
        (j % 2) as u8 ^ self.body[i] ^ (i % 2) as u8
    }

    /// Shortest hypothesis that is alive and validated.
    pub fn locked_len(&self) -> Option<usize> {
        let observed = self.body.len();
        self.alive
            .iter()
            .copied()
            .find(|&len| observed >= len + lcm(2, len))
    }

    fn locked_bit(&self) -> Option<u8> {
        if self.seen < self.body_start {
            return None;
        }
        self.locked_len().map(|len| self.expected(len, self.body.len()))
    }
}

impl SequentialObserver for KeySearchObserver {
    fn spec(&self) -> ObserverSpec {
        ObserverSpec::Keysearch {
            max_len: self.max_len,
            fallback: self.fallback_spec.clone(),
        }
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn predict(&self) -> PredictiveDistribution {
        match self.locked_bit() {
            Some(bit) => PredictiveDistribution::near_point_mass(2, bit, self.epsilon),
            None => {
                let p1 = self.fallback.prob(1);
                PredictiveDistribution::new(vec![1.0 - p1, p1]).expect("fallback is a distribution")
            }
        }
    }

    fn prob(&self, symbol: u8) -> f64 {
        match self.locked_bit() {
            Some(bit) if bit == symbol => 1.0 - self.epsilon,
            Some(_) => self.epsilon,
            None => self.fallback.prob(symbol),
        }
    }

    fn update(&mut self, symbol: u8) {
        self.fallback.update(symbol);
        self.seen += 1;
        if self.seen <= self.body_start {
            return;
        }
        self.body.push(symbol);
        let j = self.body.len() - 1;
        let mut alive = std::mem::take(&mut self.alive);
        alive.retain(|&len| j < len || self.expected(len, j) == symbol);
        self.alive = alive;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::sources::{gen_xor_crypto, random_key, CryptoParams};

    fn losses(obs: &mut KeySearchObserver, symbols: &[u8], from: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for (t, &s) in symbols.iter().enumerate() {
            if t >= from {
                out.push(-obs.prob(s).log2());
            }
            obs.update(s);
        }
        out
    }

    #[test]
    fn locks_when_budget_covers_key() {
        let mut rng = rng_from_seed(11);
        for m in [1usize, 3, 5, 8, 12] {
            let params = CryptoParams::new(random_key(m, &mut rng));
            let seq = gen_xor_crypto(&params, 5000, 1).unwrap();
            let start = params.body_start();
            let mut obs = KeySearchObserver::new(16, start, Fallback::default()).unwrap();
            let l = losses(&mut obs, seq.symbols(), start);
            let warm = 2 * lcm(2, m);
            let tail = &l[warm..];
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            assert!(mean <= 0.01, "m={m} mean={mean}");
        }
    }

    #[test]
    fn identity_key_locks_immediately() {
        let params = CryptoParams::new(vec![0]);
        let seq = gen_xor_crypto(&params, 1000, 2).unwrap();
        let mut obs = KeySearchObserver::new(1, params.body_start(), Fallback::Uniform).unwrap();
        let l = losses(&mut obs, seq.symbols(), params.body_start());
        assert!(l[3..].iter().all(|&x| x < 1e-5));
    }

    #[test]
    fn never_validates_a_wrong_hypothesis() {
        // Exhaustive over all keys with m <= 8: after two clean periods the
        // locked hypothesis always reproduces the ciphertext.
        for m in 1..=8usize {
            for bits in 0u32..(1 << m) {
                let key: Vec<u8> = (0..m).map(|i| ((bits >> i) & 1) as u8).collect();
                let params = CryptoParams {
                    key: key.clone(),
                    prefix_len: 0,
                    reveal: false,
                };
                let period = lcm(2, m);
                let seq = gen_xor_crypto(&params, 4 * period, 0).unwrap();
                let mut obs = KeySearchObserver::new(8, 0, Fallback::Uniform).unwrap();
                for (t, &s) in seq.symbols().iter().enumerate() {
                    if t >= 2 * period {
                        let len = obs.locked_len().expect("locked after two periods");
                        assert_eq!(obs.locked_bit(), Some(s), "m={m} key={key:?} len={len}");
                    }
                    obs.update(s);
                }
            }
        }
    }

    #[test]
    fn short_budget_reduces_to_fallback() {
        let mut rng = rng_from_seed(5);
        let params = CryptoParams::new(random_key(32, &mut rng));
        let seq = gen_xor_crypto(&params, 20_000, 3).unwrap();
        let start = params.body_start();
        let mut search = KeySearchObserver::new(8, start, Fallback::default()).unwrap();
        let mut markov = MarkovObserver::new(3, 1.0, 2).unwrap();
        let mut a = 0.0;
        let mut b = 0.0;
        for (t, &s) in seq.symbols().iter().enumerate() {
            if t >= start {
                a -= search.prob(s).log2();
                b -= markov.prob(s).log2();
            }
            search.update(s);
            markov.update(s);
        }
        let n = (seq.len() - start) as f64;
        assert!((a / n - b / n).abs() <= 0.01, "{} vs {}", a / n, b / n);
    }

    #[test]
    fn predictions_are_distributions() {
        let params = CryptoParams::new(vec![1, 0, 0, 1]);
        let seq = gen_xor_crypto(&params, 400, 1).unwrap();
        let mut obs = KeySearchObserver::new(6, params.body_start(), Fallback::default()).unwrap();
        for &s in seq.symbols() {
            let d = obs.predict();
            assert!(d.is_valid());
            assert!((d.prob(s) - obs.prob(s)).abs() < 1e-15);
            obs.update(s);
        }
    }
}
