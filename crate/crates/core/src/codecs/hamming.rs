//! Hamming(7,4) block code with syndrome decoding.
//!
//! Systematic layout: four data bits followed by three parity bits. Any
//! single bit error per block is corrected.

use crate::error::Error;
use crate::Result;

/// Decode outcome of one block or bit stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HammingStatus {
    /// No error observed.
    Clean,
    /// At least one block had a nonzero syndrome and was repaired.
    Corrected,
}

/// Encodes 4 data bits into a 7-bit codeword `[d1 d2 d3 d4 p1 p2 p3]`.
pub fn hamming74_encode(data: &[u8]) -> Result<[u8; 7]> {
    if data.len() != 4 {
        return Err(Error::LengthMismatch {
            context: "hamming74 data block",
            expected: 4,
            got: data.len(),
        });
    }
    let d = [data[0] & 1, data[1] & 1, data[2] & 1, data[3] & 1];
    let p1 = d[0] ^ d[1] ^ d[3];
    let p2 = d[0] ^ d[2] ^ d[3];
    let p3 = d[1] ^ d[2] ^ d[3];
    Ok([d[0], d[1], d[2], d[3], p1, p2, p3])
}

/// Columns of the parity-check matrix, as syndrome patterns `(s1 s2 s3)`,
/// indexed by codeword position.
const SYNDROME_OF_POSITION: [u8; 7] = [
    0b110, // d1
    0b101, // d2
    0b011, // d3
    0b111, // d4
    0b100, // p1
    0b010, // p2
    0b001, // p3
];

/// Decodes a 7-bit codeword, correcting any single bit error.
pub fn hamming74_decode(code: &[u8]) -> Result<([u8; 4], HammingStatus)> {
    if code.len() != 7 {
        return Err(Error::LengthMismatch {
            context: "hamming74 code block",
            expected: 7,
            got: code.len(),
        });
    }
    let mut c = [0u8; 7];
    for (slot, &bit) in c.iter_mut().zip(code) {
        *slot = bit & 1;
    }
    let s1 = c[0] ^ c[1] ^ c[3] ^ c[4];
    let s2 = c[0] ^ c[2] ^ c[3] ^ c[5];
    let s3 = c[1] ^ c[2] ^ c[3] ^ c[6];
    let syndrome = (s1 << 2) | (s2 << 1) | s3;
    let status = if syndrome == 0 {
        HammingStatus::Clean
    } else {
        let pos = SYNDROME_OF_POSITION
            .iter()
            .position(|&p| p == syndrome)
            .expect("every nonzero 3-bit syndrome matches one column");
        c[pos] ^= 1;
        HammingStatus::Corrected
    };
    Ok(([c[0], c[1], c[2], c[3]], status))
}

/// Encodes a bit stream block-wise; length must be a multiple of 4.
pub fn hamming74_encode_bits(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.is_empty() || !bits.len().is_multiple_of(4) {
        return Err(Error::param("bits", "length must be a positive multiple of 4"));
    }
    let mut out = Vec::with_capacity(bits.len() / 4 * 7);
    for block in bits.chunks(4) {
        out.extend_from_slice(&hamming74_encode(block)?);
    }
    Ok(out)
}

/// Decodes a bit stream block-wise; length must be a multiple of 7.
pub fn hamming74_decode_bits(bits: &[u8]) -> Result<(Vec<u8>, HammingStatus)> {
    if bits.is_empty() || !bits.len().is_multiple_of(7) {
        return Err(Error::param("bits", "length must be a positive multiple of 7"));
    }
    let mut out = Vec::with_capacity(bits.len() / 7 * 4);
    let mut status = HammingStatus::Clean;
    for block in bits.chunks(7) {
        let (data, s) = hamming74_decode(block)?;
        if s == HammingStatus::Corrected {
            status = HammingStatus::Corrected;
        }
        out.extend_from_slice(&data);
    }
    Ok((out, status))
}

/// The three parity bits of a 4-bit data block; the incremental-redundancy
/// portion a type-2 hybrid ARQ sender transmits on demand.
pub fn hamming74_parity_bits(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.is_empty() || !bits.len().is_multiple_of(4) {
        return Err(Error::param("bits", "length must be a positive multiple of 4"));
    }
    let mut out = Vec::with_capacity(bits.len() / 4 * 3);
    for block in bits.chunks(4) {
        let code = hamming74_encode(block)?;
        out.extend_from_slice(&code[4..]);
    }
    Ok(out)
}

/// Reassembles full codewords from separately received data and parity
/// streams, then decodes.
pub fn hamming74_combine_and_decode(
    data_bits: &[u8],
    parity_bits: &[u8],
) -> Result<(Vec<u8>, HammingStatus)> {
    if !data_bits.len().is_multiple_of(4) || parity_bits.len() != data_bits.len() / 4 * 3 {
        return Err(Error::LengthMismatch {
            context: "hamming74 parity stream",
            expected: data_bits.len() / 4 * 3,
            got: parity_bits.len(),
        });
    }
    let mut code = Vec::with_capacity(data_bits.len() / 4 * 7);
    for (block, parity) in data_bits.chunks(4).zip(parity_bits.chunks(3)) {
        code.extend_from_slice(block);
        code.extend_from_slice(parity);
    }
    hamming74_decode_bits(&code)
}
