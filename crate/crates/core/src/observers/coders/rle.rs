use crate::error::{Error, Result};

const MAX_RUN: usize = 255;

/// `(run_len, symbol)` byte pairs, runs capped at 255.
pub(super) fn encode(symbols: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < symbols.len() {
        let s = symbols[i];
        let run = symbols[i..]
            .iter()
            .take(MAX_RUN)
            .take_while(|&&x| x == s)
            .count();
        out.push(run as u8);
        out.push(s);
        i += run;
    }
    out
}

pub(super) fn decode(encoded: &[u8]) -> Result<Vec<u8>> {
    if !encoded.len().is_multiple_of(2) {
        return Err(Error::Coder {
            coder: "rle",
            reason: "odd stream length".into(),
        });
    }
    let mut out = Vec::new();
    for pair in encoded.chunks_exact(2) {
        if pair[0] == 0 {
            return Err(Error::Coder {
                coder: "rle",
                reason: "zero-length run".into(),
            });
        }
        out.extend(std::iter::repeat_n(pair[1], usize::from(pair[0])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_are_split_at_255() {
        let symbols = vec![7u8; 600];
        assert_eq!(encode(&symbols), vec![255, 7, 255, 7, 90, 7]);
        assert_eq!(decode(&encode(&symbols)).unwrap(), symbols);
    }

    #[test]
    fn malformed_streams() {
        assert!(decode(&[3]).is_err());
        assert!(decode(&[0, 1]).is_err());
    }
}
