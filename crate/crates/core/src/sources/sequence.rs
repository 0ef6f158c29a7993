use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{CryptoParams, HmmParams, MarkovChainParams, PhaseClock};
use crate::error::{Error, Result};
use crate::rng::fnv1a64;

/// Parameters of the generator that produced a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceParams {
    PeriodicNoise {
        template: Vec<u8>,
        p: f64,
        clock: PhaseClock,
    },
    Hmm {
        params: HmmParams,
    },
    XorCrypto {
        params: CryptoParams,
    },
    Iid {
        probs: Vec<f64>,
    },
    MarkovChain {
        params: MarkovChainParams,
    },
    Text {
        path: PathBuf,
    },
    /// Symbols supplied directly (tests, derived transforms).
    Raw {
        label: String,
    },
}

/// Name, parameters and seed of a sequence; enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceDescriptor {
    pub name: String,
    pub params: SourceParams,
    pub seed: u64,
}

impl SourceDescriptor {
    pub fn raw(label: impl Into<String>) -> Self {
        let label = label.into();
        SourceDescriptor {
            name: label.clone(),
            params: SourceParams::Raw { label },
            seed: 0,
        }
    }

    /// Re-runs the generator. Raw sequences cannot be regenerated.
    pub fn regenerate(&self, n: usize) -> Result<SymbolSequence> {
        match &self.params {
            SourceParams::PeriodicNoise { template, p, clock } => {
                super::periodic::gen_periodic_noise_with(template, *p, n, self.seed, *clock)
            }
            SourceParams::Hmm { params } => super::gen_hmm(params, n, self.seed),
            SourceParams::XorCrypto { params } => super::gen_xor_crypto(params, n, self.seed),
            SourceParams::Iid { probs } => super::gen_iid(probs, n, self.seed),
            SourceParams::MarkovChain { params } => super::gen_markov_chain(params, n, self.seed),
            SourceParams::Text { path } => super::load_text(path),
            SourceParams::Raw { .. } => Err(Error::param(
                "descriptor",
                "raw sequences carry no generator to re-run",
            )),
        }
    }
}

/// A finite sample over the alphabet `0..alphabet_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSequence {
    symbols: Vec<u8>,
    alphabet_size: u32,
    meta: SourceDescriptor,
}

const BINARY_HEADER_LEN: usize = 12;

impl SymbolSequence {
    pub fn new(symbols: Vec<u8>, alphabet_size: u32, meta: SourceDescriptor) -> Result<Self> {
        if !(2..=256).contains(&alphabet_size) {
            return Err(Error::param(
                "alphabet_size",
                format!("{alphabet_size} not in 2..=256"),
            ));
        }
        if symbols.is_empty() {
            return Err(Error::param("symbols", "sequence must be nonempty"));
        }
        if let Some((position, &s)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| u32::from(s) >= alphabet_size)
        {
            return Err(Error::SymbolOutOfRange {
                symbol: u32::from(s),
                position,
                alphabet_size,
            });
        }
        Ok(SymbolSequence {
            symbols,
            alphabet_size,
            meta,
        })
    }

    pub fn from_raw(symbols: Vec<u8>, alphabet_size: u32, label: &str) -> Result<Self> {
        Self::new(symbols, alphabet_size, SourceDescriptor::raw(label))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn meta(&self) -> &SourceDescriptor {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Content hash identifying the sample (symbols and alphabet only).
    pub fn fingerprint(&self) -> u64 {
        let mut bytes = Vec::with_capacity(self.symbols.len() + 4);
        bytes.extend_from_slice(&self.alphabet_size.to_le_bytes());
        bytes.extend_from_slice(&self.symbols);
        fnv1a64(&bytes)
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }

    /// Flat binary layout: `alphabet_size: u32 LE`, `length: u64 LE`, then
    /// one byte per symbol.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.alphabet_size.to_le_bytes())?;
        w.write_all(&(self.symbols.len() as u64).to_le_bytes())?;
        w.write_all(&self.symbols)?;
        Ok(())
    }

    /// Reads the flat binary layout; the descriptor comes from the sidecar.
    pub fn read_binary<R: Read>(mut r: R, meta: SourceDescriptor) -> Result<Self> {
        let mut header = [0u8; BINARY_HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|e| Error::Format(format!("header: {e}")))?;
        let alphabet_size = u32::from_le_bytes(header[0..4].try_into().unwrap());
        let len = u64::from_le_bytes(header[4..12].try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| Error::Format("length overflows usize".into()))?;
        let mut symbols = Vec::new();
        r.read_to_end(&mut symbols)?;
        if symbols.len() != len {
            return Err(Error::Format(format!(
                "header announces {len} symbols, body has {}",
                symbols.len()
            )));
        }
        Self::new(symbols, alphabet_size, meta)
    }

    /// Sidecar JSON holding the descriptor (name, parameters, seed).
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.meta)?)
    }

    /// Cuts the sequence into `block` sized pieces and shuffles their order.
    /// Destroys dependencies longer than the block while keeping symbol
    /// frequencies intact.
    pub fn block_shuffled(&self, block: usize, seed: u64) -> Result<Self> {
        use rand::seq::SliceRandom;
        if block == 0 {
            return Err(Error::param("block", "block length must be positive"));
        }
        let mut chunks: Vec<&[u8]> = self.symbols.chunks(block).collect();
        let mut rng = crate::rng::rng_from_seed(seed);
        chunks.shuffle(&mut rng);
        let symbols = chunks.concat();
        Self::new(
            symbols,
            self.alphabet_size,
            SourceDescriptor::raw(format!("{}/block-shuffled-{block}", self.meta.name)),
        )
    }
}
