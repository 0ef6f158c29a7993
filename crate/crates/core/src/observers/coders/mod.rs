//! Lossless coders used as observers. Their loss is codelength in bits per
//! symbol; every coder also decodes, so reported lengths are achievable.

mod huffman;
mod rle;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::SymbolSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoderId {
    /// Static zeroth-order Huffman with an explicit table header.
    Huffman0,
    /// DEFLATE stream (LZ77 + Huffman), best compression.
    LzDeflate,
    /// bzip2 (Burrows-Wheeler block sorting), 900k blocks.
    Blocksort,
    /// Byte-oriented run-length coder: `(run_len, symbol)` pairs.
    Rle,
}

impl CoderId {
    pub const ALL: [CoderId; 4] = [CoderId::Huffman0, CoderId::LzDeflate, CoderId::Blocksort, CoderId::Rle];

    pub fn name(self) -> &'static str {
        match self {
            CoderId::Huffman0 => "huffman0",
            CoderId::LzDeflate => "lz_deflate",
            CoderId::Blocksort => "blocksort",
            CoderId::Rle => "rle",
        }
    }

    pub fn encode(self, symbols: &[u8], alphabet_size: u32) -> Result<Encoded> {
        match self {
            CoderId::Huffman0 => huffman::encode(symbols, alphabet_size),
            CoderId::LzDeflate => {
                let mut enc = flate2::write::DeflateEncoder::new(Vec::new(), flate2::Compression::best());
                enc.write_all(symbols)?;
                Ok(Encoded::whole_bytes(enc.finish()?))
            }
            CoderId::Blocksort => {
                let mut enc = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::best());
                enc.write_all(symbols)?;
                Ok(Encoded::whole_bytes(enc.finish()?))
            }
            CoderId::Rle => Ok(Encoded::whole_bytes(rle::encode(symbols))),
        }
    }

    pub fn decode(self, encoded: &[u8]) -> Result<Vec<u8>> {
        match self {
            CoderId::Huffman0 => huffman::decode(encoded),
            CoderId::LzDeflate => {
                let mut out = Vec::new();
                flate2::read::DeflateDecoder::new(encoded).read_to_end(&mut out)?;
                Ok(out)
            }
            CoderId::Blocksort => {
                let mut out = Vec::new();
                bzip2::read::BzDecoder::new(encoded).read_to_end(&mut out)?;
                Ok(out)
            }
            CoderId::Rle => rle::decode(encoded),
        }
    }
}

impl std::fmt::Display for CoderId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CoderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoderId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param("coder", format!("unknown coder `{s}`")))
    }
}

/// A compressed stream and its exact length in bits (the byte buffer may
/// carry padding in its last byte).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub bits: u64,
}

impl Encoded {
    fn whole_bytes(bytes: Vec<u8>) -> Self {
        let bits = 8 * bytes.len() as u64;
        Encoded { bytes, bits }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Codelength {
    pub coder: CoderId,
    pub total_bits: u64,
    pub bits_per_symbol: f64,
}

/// Exact compressed size of `sequence` under `coder`.
pub fn coder_codelength(coder: CoderId, sequence: &SymbolSequence) -> Result<Codelength> {
    let encoded = coder.encode(sequence.symbols(), sequence.alphabet_size())?;
    Ok(Codelength {
        coder,
        total_bits: encoded.bits,
        bits_per_symbol: encoded.bits as f64 / sequence.len() as f64,
    })
}
