use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SourceDescriptor, SourceParams, SymbolSequence};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// When the hidden template pointer advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseClock {
    /// Advance only when the template branch emits ("next symbol from the
    /// template"). Noise symbols are insertions.
    #[default]
    OnEmit,
    /// Advance every step; noise overwrites the template symbol.
    EveryStep,
}

/// Bernoulli mixture of a periodic template and fair coin flips.
///
/// The starting phase is drawn uniformly per sequence. With probability `p`
/// the current template symbol is emitted, otherwise a fair bit.
pub fn gen_periodic_noise(template: &[u8], p: f64, n: usize, seed: u64) -> Result<SymbolSequence> {
    gen_periodic_noise_with(template, p, n, seed, PhaseClock::default())
}

pub fn gen_periodic_noise_with(
    template: &[u8],
    p: f64,
    n: usize,
    seed: u64,
    clock: PhaseClock,
) -> Result<SymbolSequence> {
    if template.is_empty() {
        return Err(Error::param("template", "template must be nonempty"));
    }
    if let Some(&bad) = template.iter().find(|&&b| b > 1) {
        return Err(Error::param("template", format!("template symbol {bad} is not a bit")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut phase = rng.random_range(0..template.len());
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        let from_template = rng.random_bool(p);
        if from_template {
            symbols.push(template[phase]);
        } else {
            symbols.push(u8::from(rng.random::<bool>()));
        }
        if from_template || clock == PhaseClock::EveryStep {
            phase = (phase + 1) % template.len();
        }
    }
    let meta = SourceDescriptor {
        name: "periodic_noise".into(),
        params: SourceParams::PeriodicNoise {
            template: template.to_vec(),
            p,
            clock,
        },
        seed,
    };
    SymbolSequence::new(symbols, 2, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plugin_entropy(symbols: &[u8]) -> f64 {
        let ones = symbols.iter().filter(|&&s| s == 1).count() as f64;
        let q = ones / symbols.len() as f64;
        [q, 1.0 - q]
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum()
    }

    #[test]
    fn p_one_is_the_rotated_template() {
        for clock in [PhaseClock::OnEmit, PhaseClock::EveryStep] {
            for seed in 0..8 {
                let tpl = [0u8, 0, 0, 1, 1, 1];
                let seq = gen_periodic_noise_with(&tpl, 1.0, 60, seed, clock).unwrap();
                let s = seq.symbols();
                let phase = (0..6)
                    .find(|&ph| (0..6).all(|i| s[i] == tpl[(ph + i) % 6]))
                    .expect("sequence is some rotation of the template");
                assert!(s.iter().enumerate().all(|(i, &x)| x == tpl[(phase + i) % 6]));
            }
        }
    }

    #[test]
    fn alternating_template_alternates() {
        let seq = gen_periodic_noise(&[0, 1], 1.0, 100, 3).unwrap();
        assert!(seq.symbols().windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn p_zero_is_a_fair_coin() {
        let seq = gen_periodic_noise(&[0, 0, 0, 1, 1, 1], 0.0, 100_000, 5).unwrap();
        let mean = seq.symbols().iter().map(|&s| f64::from(s)).sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn half_mixture_has_intermediate_entropy() {
        let seq = gen_periodic_noise(&[0, 1], 0.5, 60_000, 9).unwrap();
        let h = plugin_entropy(seq.symbols());
        assert!(h > 0.0 && h < 1.0 + 1e-12, "h {h}");
        // Marginal is exactly balanced: 0.5 * template + 0.5 * uniform.
        assert!(h > 0.999);
    }

    #[test]
    fn errors() {
        assert!(gen_periodic_noise(&[], 0.5, 10, 0).is_err());
        assert!(gen_periodic_noise(&[0, 1], 1.5, 10, 0).is_err());
        assert!(gen_periodic_noise(&[0, 1], -0.1, 10, 0).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let a = gen_periodic_noise(&[0, 1, 1], 0.7, 5000, 42).unwrap();
        let b = gen_periodic_noise(&[0, 1, 1], 0.7, 5000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.meta().regenerate(5000).unwrap(), a);
        let c = gen_periodic_noise(&[0, 1, 1], 0.7, 5000, 43).unwrap();
        assert_ne!(a.symbols(), c.symbols());
    }
}
