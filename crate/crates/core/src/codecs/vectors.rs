//! Line-oriented conformance test vectors for the codecs.
//!
//! One case per line: `<codec> <input> <expected>` where bit sequences are
//! written as `<bit-count>:<hex>` with bits packed most significant first.
//! Blank lines and `#` comments are permitted. The format is the
//! cross-implementation interop surface, so it is pinned by a golden file.

use super::{bits_to_symbols, symbols_to_bits, CodeSpec};
use crate::error::Error;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn encode_bits_field(bits: &[u8]) -> String {
    let mut hex = String::new();
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            byte |= (b & 1) << (7 - i);
        }
        hex.push_str(&format!("{byte:02x}"));
    }
    format!("{}:{hex}", bits.len())
}

fn decode_bits_field(field: &str) -> Result<Vec<u8>> {
    let (count, hex) = field
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig(format!("malformed bit field `{field}`")))?;
    let count: usize = count
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad bit count in `{field}`")))?;
    if hex.len() != count.div_ceil(8) * 2 {
        return Err(Error::InvalidConfig(format!("hex length mismatch in `{field}`")));
    }
    let mut bits = Vec::with_capacity(count);
    for (i, pair) in hex.as_bytes().chunks(2).enumerate() {
        let s = std::str::from_utf8(pair).unwrap();
        let byte = u8::from_str_radix(s, 16)
            .map_err(|_| Error::InvalidConfig(format!("bad hex in `{field}`")))?;
        for bit in 0..8 {
            if i * 8 + bit < count {
                bits.push((byte >> (7 - bit)) & 1);
            } else if (byte >> (7 - bit)) & 1 != 0 {
                // Padding bits past the count must be zero so every bit
                // sequence has exactly one encoding.
                return Err(Error::InvalidConfig(format!(
                    "nonzero padding bits in `{field}`"
                )));
            }
        }
    }
    Ok(bits)
}

fn codec_by_label(label: &str) -> Result<CodeSpec> {
    match label {
        "crc4" => Ok(CodeSpec::crc4()),
        "hamming74" => Ok(CodeSpec::hamming74()),
        "rs7-3m3" => CodeSpec::reed_solomon(3, 7, 3),
        "rs31-21m5" => CodeSpec::reed_solomon(5, 31, 21),
        other => Err(Error::InvalidConfig(format!("unknown codec label `{other}`"))),
    }
}

/// Renders one vector line for a codec's frame encoding.
pub fn vector_line(spec: &CodeSpec, content: &[u8]) -> Result<String> {
    let coded = spec.encode_frame(content)?.to_bits();
    Ok(format!(
        "{} {} {}",
        spec.label(),
        encode_bits_field(content),
        encode_bits_field(&coded)
    ))
}

/// Deterministic reference vector set covering every codec.
pub fn reference_vectors() -> String {
    let mut out = String::from("# codec input expected (bits as count:hex, msb first)\n");
    let crc = CodeSpec::crc4();
    for payload in [
        vec![1u8],
        vec![0, 1, 0, 1, 1, 0, 1, 0],
        vec![1; 16],
        vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    ] {
        out.push_str(&vector_line(&crc, &payload).unwrap());
        out.push('\n');
    }
    let hamming = CodeSpec::hamming74();
    for v in 0u32..16 {
        let bits: Vec<u8> = (0..4).map(|i| ((v >> (3 - i)) & 1) as u8).collect();
        out.push_str(&vector_line(&hamming, &bits).unwrap());
        out.push('\n');
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (spec, cases) in [
        (CodeSpec::reed_solomon(3, 7, 3).unwrap(), 8usize),
        (CodeSpec::reed_solomon(5, 31, 21).unwrap(), 4usize),
    ] {
        for _ in 0..cases {
            let len = match spec.kind() {
                super::CodeKind::ReedSolomon { symbol_bits, k, .. } => {
                    symbol_bits as usize * k
                }
                _ => unreachable!(),
            };
            let bits: Vec<u8> = (0..len).map(|_| rng.gen::<bool>() as u8).collect();
            out.push_str(&vector_line(&spec, &bits).unwrap());
            out.push('\n');
        }
    }
    out
}

/// Checks every line of a vector file against this implementation.
/// Returns the number of verified cases.
pub fn verify_vectors(text: &str) -> Result<usize> {
    let mut verified = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (label, input, expected) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c)) if fields.next().is_none() => (a, b, c),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected `codec input output`",
                    lineno + 1
                )))
            }
        };
        let spec = codec_by_label(label)?;
        let content = decode_bits_field(input)?;
        let expected = decode_bits_field(expected)?;
        let coded = spec.encode_frame(&content)?.to_bits();
        if coded != expected {
            return Err(Error::InvalidConfig(format!(
                "line {}: {} encoding mismatch",
                lineno + 1,
                label
            )));
        }
        // Decode must invert encode.
        let decoded = spec.decode_frame(&coded, content.len())?;
        if decoded.content != content || !decoded.status.is_ok() {
            return Err(Error::InvalidConfig(format!(
                "line {}: {} decode round trip failed",
                lineno + 1,
                label
            )));
        }
        verified += 1;
    }
    Ok(verified)
}

/// Symbol/bit helpers are re-exported for tooling that prepares vectors in
/// symbol space.
pub fn symbols_field(symbols: &[u16], symbol_bits: u32) -> String {
    encode_bits_field(&symbols_to_bits(symbols, symbol_bits))
}

pub fn field_symbols(field: &str, symbol_bits: u32) -> Result<Vec<u16>> {
    Ok(bits_to_symbols(&decode_bits_field(field)?, symbol_bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_vectors_verify_and_are_stable() {
        let text = reference_vectors();
        let n = verify_vectors(&text).unwrap();
        assert!(n >= 28, "expected a full vector set, got {n}");
        assert_eq!(text, reference_vectors(), "vector generation must be deterministic");
    }

    #[test]
    fn corrupted_vector_is_rejected() {
        let text = reference_vectors();
        // Flip one hex digit in the last field of the first data line.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let idx = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        let flipped = if lines[idx].ends_with('0') { "1" } else { "0" };
        let mut s = lines[idx].clone();
        s.pop();
        s.push_str(flipped);
        lines[idx] = s;
        let bad = lines.join("\n");
        assert!(verify_vectors(&bad).is_err());
    }

    #[test]
    fn bit_field_round_trip() {
        let bits = vec![1, 0, 1, 1, 0, 0, 0, 1, 1];
        let field = encode_bits_field(&bits);
        assert_eq!(field, "9:b180");
        assert_eq!(decode_bits_field(&field).unwrap(), bits);
        assert!(decode_bits_field("9:b1").is_err());
        assert!(decode_bits_field("b180").is_err());
    }
}
