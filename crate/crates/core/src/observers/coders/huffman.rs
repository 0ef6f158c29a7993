//! Static zeroth-order Huffman coder.
//!
//! Stream layout (MSB-first bits):
//!
//! ```text
//! alphabet_size      16 bits
//! presence bitmap    alphabet_size bits
//! code lengths       8 bits per present symbol
//! message length     64 bits
//! payload            canonical codewords
//! ```

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const MAX_CODE_LEN: u8 = 64;

fn err(reason: impl Into<String>) -> Error {
    Error::Coder {
        coder: "huffman0",
        reason: reason.into(),
    }
}

#[cfg(test)]
pub(super) fn header_bits(alphabet_size: u32, active: usize) -> u64 {
    16 + u64::from(alphabet_size) + 8 * active as u64 + 64
}

/// Code length per symbol (0 for absent symbols).
fn code_lengths(counts: &[u64]) -> Vec<u8> {
    let active: Vec<usize> = (0..counts.len()).filter(|&s| counts[s] > 0).collect();
    let mut lengths = vec![0u8; counts.len()];
    if active.len() == 1 {
        lengths[active[0]] = 1;
        return lengths;
    }
    // Nodes 0..n are leaves; parents are appended. Ties break on node id so
    // the tree is deterministic.
    let mut parent: Vec<usize> = vec![usize::MAX; active.len()];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        active.iter().enumerate().map(|(i, &s)| Reverse((counts[s], i))).collect();
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((wa + wb, id)));
    }
    for (leaf, &s) in active.iter().enumerate() {
        let mut depth = 0u32;
        let mut node = leaf;
        while parent[node] != usize::MAX {
            node = parent[node];
            depth += 1;
        }
        lengths[s] = depth.min(255) as u8;
    }
    lengths
}

/// Canonical codewords from lengths: shorter codes first, ties by symbol.
fn canonical_codes(lengths: &[u8]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..lengths.len()).filter(|&s| lengths[s] > 0).collect();
    order.sort_by_key(|&s| (lengths[s], s));
    let mut codes = vec![0u64; lengths.len()];
    let mut code = 0u64;
    let mut prev_len = 0u8;
    for (i, &s) in order.iter().enumerate() {
        let len = lengths[s];
        if i > 0 {
            code = (code + 1) << (len - prev_len);
        } else {
            code = 0;
        }
        codes[s] = code;
        prev_len = len;
    }
    codes
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter { bytes: Vec::new(), bits: 0 }
    }

    fn put(&mut self, value: u64, width: u8) {
        for i in (0..width).rev() {
            let bit = (value >> i) & 1;
            if self.bits.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if bit == 1 {
                let last = self.bytes.last_mut().unwrap();
                *last |= 0x80 >> (self.bits % 8);
            }
            self.bits += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl BitReader<'_> {
    fn bit(&mut self) -> Result<u64> {
        let byte = self
            .bytes
            .get((self.pos / 8) as usize)
            .ok_or_else(|| err("stream ended early"))?;
        let bit = (byte >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Ok(u64::from(bit))
    }

    fn take(&mut self, width: u8) -> Result<u64> {
        (0..width).try_fold(0u64, |acc, _| Ok((acc << 1) | self.bit()?))
    }
}

pub(super) fn encode(symbols: &[u8], alphabet_size: u32) -> Result<super::Encoded> {
    if !(1..=256).contains(&alphabet_size) {
        return Err(err(format!("alphabet of {alphabet_size} symbols unsupported (max 256)")));
    }
    if symbols.is_empty() {
        return Err(err("empty input"));
    }
    let mut counts = vec![0u64; alphabet_size as usize];
    for &s in symbols {
        *counts
            .get_mut(usize::from(s))
            .ok_or_else(|| err(format!("symbol {s} outside alphabet")))? += 1;
    }
    let lengths = code_lengths(&counts);
    if lengths.iter().any(|&l| l > MAX_CODE_LEN) {
        return Err(err("code length exceeds 64 bits"));
    }
    let codes = canonical_codes(&lengths);

    let mut w = BitWriter::new();
    w.put(u64::from(alphabet_size), 16);
    for &l in &lengths {
        w.put(u64::from(l > 0), 1);
    }
    for &l in lengths.iter().filter(|&&l| l > 0) {
        w.put(u64::from(l), 8);
    }
    w.put(symbols.len() as u64, 64);
    for &s in symbols {
        w.put(codes[usize::from(s)], lengths[usize::from(s)]);
    }
    Ok(super::Encoded {
        bits: w.bits,
        bytes: w.bytes,
    })
}

pub(super) fn decode(encoded: &[u8]) -> Result<Vec<u8>> {
    let mut r = BitReader { bytes: encoded, pos: 0 };
    let alphabet_size = r.take(16)? as usize;
    if !(1..=256).contains(&alphabet_size) {
        return Err(err("bad alphabet size"));
    }
    let present: Vec<bool> = (0..alphabet_size).map(|_| r.bit().map(|b| b == 1)).collect::<Result<_>>()?;
    let mut lengths = vec![0u8; alphabet_size];
    for (s, _) in present.iter().enumerate().filter(|(_, &p)| p) {
        lengths[s] = r.take(8)? as u8;
        if lengths[s] == 0 || lengths[s] > MAX_CODE_LEN {
            return Err(err("bad code length"));
        }
    }
    let n = r.take(64)?;
    let codes = canonical_codes(&lengths);
    let mut table: Vec<(u8, u64, u8)> = (0..alphabet_size)
        .filter(|&s| lengths[s] > 0)
        .map(|s| (lengths[s], codes[s], s as u8))
        .collect();
    table.sort_unstable();

    let mut out = Vec::with_capacity(usize::try_from(n).unwrap_or(0).min(1 << 28));
    for _ in 0..n {
        let mut code = 0u64;
        let mut len = 0u8;
        let mut idx = 0;
        loop {
            code = (code << 1) | r.bit()?;
            len += 1;
            while idx < table.len() && table[idx].0 < len {
                idx += 1;
            }
            let hit = table[idx..]
                .iter()
                .take_while(|e| e.0 == len)
                .find(|e| e.1 == code);
            if let Some(e) = hit {
                out.push(e.2);
                break;
            }
            if len >= MAX_CODE_LEN || idx >= table.len() {
                return Err(err("invalid codeword"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_lengths() {
        // Frequencies 45, 13, 12, 16, 9, 5 give lengths 1, 3, 3, 3, 4, 4.
        let lengths = code_lengths(&[45, 13, 12, 16, 9, 5]);
        assert_eq!(lengths, vec![1, 3, 3, 3, 4, 4]);
        let kraft: f64 = lengths.iter().map(|&l| 0.5f64.powi(i32::from(l))).sum();
        assert!((kraft - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_codes_are_prefix_free() {
        let lengths = vec![2, 0, 3, 3, 2, 2];
        let codes = canonical_codes(&lengths);
        assert_eq!(codes, vec![0b00, 0, 0b110, 0b111, 0b01, 0b10]);
    }

    #[test]
    fn exact_bit_count() {
        let symbols = [0u8, 0, 0, 1, 2, 2];
        let enc = encode(&symbols, 4).unwrap();
        // Lengths: 0 -> 1, 1 -> 2, 2 -> 2; payload 3*1 + 1*2 + 2*2 = 9.
        assert_eq!(enc.bits, header_bits(4, 3) + 9);
        assert_eq!(decode(&enc.bytes).unwrap(), symbols);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode(&[]).is_err());
        assert!(encode(&[], 2).is_err());
        assert!(encode(&[3], 2).is_err());
    }
}
