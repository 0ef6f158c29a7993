use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SourceDescriptor, SourceParams, SymbolSequence};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Two-state hidden Markov model with binary emissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmParams {
    /// `transition[i][j]` = P(next state j | state i).
    pub transition: [[f64; 2]; 2],
    /// `emission[i][y]` = P(output y | state i).
    pub emission: [[f64; 2]; 2],
}

impl Default for HmmParams {
    /// Sticky transitions, biased emissions.
    fn default() -> Self {
        HmmParams {
            transition: [[0.98, 0.02], [0.02, 0.98]],
            emission: [[0.85, 0.15], [0.15, 0.85]],
        }
    }
}

fn check_rows(name: &str, m: &[[f64; 2]; 2]) -> Result<()> {
    for (i, row) in m.iter().enumerate() {
        if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::NotStochastic(format!("{name} row {i} has entry outside [0,1]")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotStochastic(format!("{name} row {i} sums to {sum}")));
        }
    }
    Ok(())
}

impl HmmParams {
    pub fn validate(&self) -> Result<()> {
        check_rows("transition", &self.transition)?;
        check_rows("emission", &self.emission)
    }

    /// Stationary law of the hidden chain. A reducible chain (no switching)
    /// has no unique stationary law; it starts in state 0.
    pub fn stationary(&self) -> [f64; 2] {
        let out0 = self.transition[0][1];
        let out1 = self.transition[1][0];
        if out0 + out1 == 0.0 {
            return [1.0, 0.0];
        }
        let pi0 = out1 / (out0 + out1);
        [pi0, 1.0 - pi0]
    }
}

/// Samples `n` outputs; the initial hidden state follows the stationary law.
pub fn gen_hmm(params: &HmmParams, n: usize, seed: u64) -> Result<SymbolSequence> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let pi = params.stationary();
    let mut state = usize::from(!rng.random_bool(pi[0]));
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        symbols.push(u8::from(rng.random_bool(params.emission[state][1])));
        state = if rng.random_bool(params.transition[state][1]) { 1 } else { 0 };
    }
    let meta = SourceDescriptor {
        name: "hmm".into(),
        params: SourceParams::Hmm {
            params: params.clone(),
        },
        seed,
    };
    SymbolSequence::new(symbols, 2, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_identity_is_all_zero() {
        let params = HmmParams {
            transition: [[1.0, 0.0], [0.0, 1.0]],
            emission: [[1.0, 0.0], [0.0, 1.0]],
        };
        let seq = gen_hmm(&params, 1000, 1).unwrap();
        assert!(seq.symbols().iter().all(|&s| s == 0));
    }

    #[test]
    fn default_params_have_balanced_marginal() {
        // The sticky chain has an effective sample size far below n, so a
        // single 5e4 draw wanders by ~0.011; average 16 of them.
        let means: Vec<f64> = (0..16)
            .map(|seed| {
                let seq = gen_hmm(&HmmParams::default(), 50_000, seed).unwrap();
                seq.symbols().iter().map(|&s| f64::from(s)).sum::<f64>() / 5e4
            })
            .collect();
        let mean = means.iter().sum::<f64>() / 16.0;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let params = HmmParams {
            transition: [[0.5, 0.6], [0.5, 0.5]],
            ..HmmParams::default()
        };
        assert!(matches!(gen_hmm(&params, 10, 0), Err(Error::NotStochastic(_))));
        let params = HmmParams {
            emission: [[1.2, -0.2], [0.5, 0.5]],
            ..HmmParams::default()
        };
        assert!(gen_hmm(&params, 10, 0).is_err());
    }
}
