use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SourceDescriptor, SourceParams, SymbolSequence};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const DEFAULT_PREFIX_LEN: usize = 64;

/// Repeating-key XOR over the alternating plaintext `0, 1, 0, 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptoParams {
    pub key: Vec<u8>,
    /// Length of the i.i.d. fair prefix emitted before anything else.
    pub prefix_len: usize,
    /// Emit the key bits in the clear between prefix and body.
    pub reveal: bool,
}

impl CryptoParams {
    pub fn new(key: Vec<u8>) -> Self {
        CryptoParams {
            key,
            prefix_len: DEFAULT_PREFIX_LEN,
            reveal: true,
        }
    }

    pub fn key_len(&self) -> usize {
        self.key.len()
    }

    /// Index of the first ciphertext symbol.
    pub fn body_start(&self) -> usize {
        self.prefix_len + if self.reveal { self.key.len() } else { 0 }
    }

    /// Period of the ciphertext body.
    pub fn period(&self) -> usize {
        lcm(2, self.key.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.key.is_empty() {
            return Err(Error::param("key", "key length must be at least 1"));
        }
        if self.key.iter().any(|&b| b > 1) {
            return Err(Error::param("key", "key must be a bit array"));
        }
        Ok(())
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Key bits drawn i.i.d. fair.
pub fn random_key<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| u8::from(rng.random::<bool>())).collect()
}

fn is_primitive(key: &[u8]) -> bool {
    let m = key.len();
    (1..m)
        .filter(|d| m.is_multiple_of(*d))
        .all(|d| (0..m).any(|i| key[i] != key[i % d]))
}

/// Key bits drawn i.i.d. fair, conditioned on the key not repeating with a
/// shorter period (a periodic key of length m is a shorter key in disguise).
pub fn random_primitive_key<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    loop {
        let key = random_key(len, rng);
        if len <= 1 || is_primitive(&key) {
            return key;
        }
    }
}

/// `[prefix] ++ [key if reveal] ++ [c_j = (j mod 2) XOR key[j mod m]]`.
pub fn gen_xor_crypto(params: &CryptoParams, n: usize, seed: u64) -> Result<SymbolSequence> {
    params.validate()?;
    let needed = params.body_start() + params.period();
    if n < needed {
        return Err(Error::param(
            "n",
            format!("{n} cannot hold prefix, reveal and one body period ({needed})"),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut symbols = Vec::with_capacity(n);
    symbols.extend((0..params.prefix_len).map(|_| u8::from(rng.random::<bool>())));
    if params.reveal {
        symbols.extend_from_slice(&params.key);
    }
    let m = params.key.len();
    let body_len = n - symbols.len();
    symbols.extend((0..body_len).map(|j| (j % 2) as u8 ^ params.key[j % m]));
    let meta = SourceDescriptor {
        name: format!("xor_crypto_m{m}"),
        params: SourceParams::XorCrypto {
            params: params.clone(),
        },
        seed,
    };
    SymbolSequence::new(symbols, 2, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(key: Vec<u8>, n: usize) -> Vec<u8> {
        let params = CryptoParams {
            key,
            prefix_len: 0,
            reveal: false,
        };
        gen_xor_crypto(&params, n, 0).unwrap().into_symbols()
    }

    #[test]
    fn known_bodies() {
        assert_eq!(body(vec![1, 0, 1], 12), vec![1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0]);
        assert_eq!(body(vec![0], 6), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(body(vec![1, 1], 6), vec![1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn layout_with_prefix_and_reveal() {
        let params = CryptoParams {
            key: vec![1, 1, 0],
            prefix_len: 5,
            reveal: true,
        };
        let seq = gen_xor_crypto(&params, 40, 9).unwrap();
        assert_eq!(params.body_start(), 8);
        assert_eq!(&seq.symbols()[5..8], &[1, 1, 0]);
        assert_eq!(seq.symbols()[8], 1);
    }

    #[test]
    fn body_has_exact_period() {
        let mut rng = rng_from_seed(4);
        for m in 1..=12 {
            for _ in 0..5 {
                let key = random_key(m, &mut rng);
                let period = lcm(2, m);
                let b = body(key, 4 * period);
                assert!((period..b.len()).all(|t| b[t] == b[t - period]));
            }
        }
    }

    #[test]
    fn too_short_is_rejected() {
        let params = CryptoParams::new(vec![1, 0, 1]);
        assert!(gen_xor_crypto(&params, 64 + 3 + 5, 0).is_err());
        assert!(gen_xor_crypto(&params, 64 + 3 + 6, 0).is_ok());
        assert!(gen_xor_crypto(&CryptoParams::new(vec![]), 100, 0).is_err());
    }

    #[test]
    fn primitive_keys_have_no_shorter_period() {
        assert!(!is_primitive(&[1, 0, 1, 0]));
        assert!(!is_primitive(&[1, 1, 1]));
        assert!(is_primitive(&[1, 1, 0, 0]));
        let mut rng = rng_from_seed(1);
        for m in [4, 8, 12] {
            for _ in 0..50 {
                assert!(is_primitive(&random_primitive_key(m, &mut rng)));
            }
        }
    }
}
