//! Bit-sequence helpers. Bits are stored one per byte, each `0` or `1`.

use crate::error::CodecError;
use crate::gf::Symbol;

/// Groups bits into `s`-bit symbols, most significant bit first.
pub fn pack_symbols(bits: &[u8], s: u32) -> Result<Vec<Symbol>, CodecError> {
    let width = s as usize;
    if width == 0 || !bits.len().is_multiple_of(width) {
        return Err(CodecError::NotSymbolAligned {
            bits: bits.len(),
            s,
        });
    }
    Ok(bits
        .chunks_exact(width)
        .map(|chunk| chunk.iter().fold(0 as Symbol, |acc, &b| (acc << 1) | (b & 1) as Symbol))
        .collect())
}

/// Inverse of [`pack_symbols`].
pub fn unpack_symbols(symbols: &[Symbol], s: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * s as usize);
    for &sym in symbols {
        for shift in (0..s).rev() {
            out.push(((sym >> shift) & 1) as u8);
        }
    }
    out
}

/// Number of positions at which two bit sequences differ.
pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let bits = [0, 0, 0, 1, 1, 0, 1, 0];
        assert_eq!(pack_symbols(&bits, 4).unwrap(), vec![0x1, 0xA]);
        assert_eq!(unpack_symbols(&[0x1, 0xA], 4), bits.to_vec());
    }

    #[test]
    fn misaligned_input_is_rejected() {
        assert_eq!(
            pack_symbols(&[1, 0, 1], 2),
            Err(CodecError::NotSymbolAligned { bits: 3, s: 2 })
        );
    }
}
