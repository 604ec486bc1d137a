//! CRC-4 error detection over bit sequences.
//!
//! Polynomial x^4 + x + 1, most-significant bit first, zero initial
//! remainder, no reflection, no final xor. These choices are part of the
//! wire contract and are pinned by the conformance test vectors.

use crate::error::Error;
use crate::Result;

/// Low nibble of the polynomial; x^4 reduces to x + 1.
const POLY_LOW: u8 = 0b0011;

/// Number of check bits appended to a frame.
pub const CRC4_BITS: usize = 4;

fn remainder(bits: impl IntoIterator<Item = u8>) -> u8 {
    let mut reg = 0u8;
    for bit in bits {
        let top = reg >> 3;
        reg = ((reg << 1) | (bit & 1)) & 0xF;
        if top == 1 {
            reg ^= POLY_LOW;
        }
    }
    reg
}

/// Computes the 4 check bits of a payload (most significant first).
pub fn crc4(payload: &[u8]) -> Result<[u8; 4]> {
    if payload.is_empty() {
        return Err(Error::param("bits", "payload must be non-empty"));
    }
    let r = remainder(payload.iter().copied().chain(std::iter::repeat_n(0, 4)));
    Ok([(r >> 3) & 1, (r >> 2) & 1, (r >> 1) & 1, r & 1])
}

/// Appends the 4 check bits to a payload.
pub fn crc4_append(payload: &[u8]) -> Result<Vec<u8>> {
    let check = crc4(payload)?;
    let mut frame = Vec::with_capacity(payload.len() + 4);
    frame.extend_from_slice(payload);
    frame.extend_from_slice(&check);
    Ok(frame)
}

/// Checks a full frame (payload followed by its 4 check bits). True iff the
/// frame's remainder under the polynomial is zero.
pub fn crc4_check(frame: &[u8]) -> Result<bool> {
    if frame.len() < 5 {
        return Err(Error::param(
            "frame",
            "must contain at least 1 payload bit plus 4 check bits",
        ));
    }
    Ok(remainder(frame.iter().copied()) == 0)
}
