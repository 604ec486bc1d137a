//! Error-detection and error-correction codes used by the protocols:
//! CRC-4, Hamming(7,4), and hard-decision Reed-Solomon over GF(2^m),
//! plus a uniform frame-level encode/decode surface over bit sequences.

pub mod crc4;
pub mod gf;
pub mod hamming;
pub mod rs;
pub mod vectors;

pub use crc4::{crc4_append, crc4_check, CRC4_BITS};
pub use hamming::{hamming74_decode, hamming74_encode, HammingStatus};
pub use rs::{ReedSolomon, RsStatus};

use crate::error::Error;
use crate::Result;
use std::sync::Arc;

/// Which error-control code is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Plain transmission.
    None,
    /// 4-bit cyclic redundancy check; detection only.
    Crc4,
    /// Hamming(7,4); corrects one bit per 7-bit block.
    Hamming74,
    /// RS(n, k) over GF(2^m) symbols.
    ReedSolomon { symbol_bits: u32, n: usize, k: usize },
}

/// A code instance with its derived parameters (and, for Reed-Solomon,
/// the field tables built once and shared).
#[derive(Debug, Clone)]
pub struct CodeSpec {
    kind: CodeKind,
    rs: Option<Arc<ReedSolomon>>,
}

impl PartialEq for CodeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl CodeSpec {
    pub fn none() -> Self {
        CodeSpec { kind: CodeKind::None, rs: None }
    }

    pub fn crc4() -> Self {
        CodeSpec { kind: CodeKind::Crc4, rs: None }
    }

    pub fn hamming74() -> Self {
        CodeSpec { kind: CodeKind::Hamming74, rs: None }
    }

    pub fn reed_solomon(symbol_bits: u32, n: usize, k: usize) -> Result<Self> {
        let rs = ReedSolomon::new(symbol_bits, n, k)?;
        Ok(CodeSpec {
            kind: CodeKind::ReedSolomon { symbol_bits, n, k },
            rs: Some(Arc::new(rs)),
        })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn is_none(&self) -> bool {
        self.kind == CodeKind::None
    }

    /// Information bits per coded bit. Detection-only codes count as rate 1;
    /// their additive overhead is visible in the frame geometry instead.
    pub fn code_rate(&self) -> f64 {
        match self.kind {
            CodeKind::None | CodeKind::Crc4 => 1.0,
            CodeKind::Hamming74 => 4.0 / 7.0,
            CodeKind::ReedSolomon { n, k, .. } => k as f64 / n as f64,
        }
    }

    /// Short stable label used in CSV output and test vectors.
    pub fn label(&self) -> String {
        match self.kind {
            CodeKind::None => "none".into(),
            CodeKind::Crc4 => "crc4".into(),
            CodeKind::Hamming74 => "hamming74".into(),
            CodeKind::ReedSolomon { symbol_bits, n, k } => format!("rs{n}-{k}m{symbol_bits}"),
        }
    }

    /// Data bits consumed per code block.
    pub(crate) fn data_block_bits(&self) -> usize {
        match self.kind {
            CodeKind::None | CodeKind::Crc4 => 0, // unblocked
            CodeKind::Hamming74 => 4,
            CodeKind::ReedSolomon { symbol_bits, k, .. } => symbol_bits as usize * k,
        }
    }

    /// Redundancy bits emitted per code block.
    pub(crate) fn parity_block_bits(&self) -> usize {
        match self.kind {
            CodeKind::None => 0,
            CodeKind::Crc4 => CRC4_BITS,
            CodeKind::Hamming74 => 3,
            CodeKind::ReedSolomon { symbol_bits, n, k } => symbol_bits as usize * (n - k),
        }
    }

    /// Length of the coded frame for a given content length.
    pub fn coded_len(&self, content_bits: usize) -> usize {
        match self.kind {
            CodeKind::None => content_bits,
            CodeKind::Crc4 => content_bits + CRC4_BITS,
            _ => {
                let dbb = self.data_block_bits();
                let blocks = content_bits.div_ceil(dbb);
                blocks * (dbb + self.parity_block_bits())
            }
        }
    }

    /// Encodes content bits into a [`Codeword`]. Block codes zero-pad the
    /// final block; the pad travels with the frame and is stripped on
    /// decode using the known content length.
    pub fn encode_frame(&self, content: &[u8]) -> Result<Codeword> {
        if content.is_empty() {
            return Err(Error::param("content", "must be non-empty"));
        }
        match self.kind {
            CodeKind::None => Ok(Codeword {
                content_bits: content.len(),
                payload_bits: content.to_vec(),
                parity_bits: Vec::new(),
                symbol_width: 1,
                data_block_bits: content.len(),
                parity_block_bits: 0,
            }),
            CodeKind::Crc4 => {
                let check = crc4::crc4(content)?;
                Ok(Codeword {
                    content_bits: content.len(),
                    payload_bits: content.to_vec(),
                    parity_bits: check.to_vec(),
                    symbol_width: 1,
                    data_block_bits: content.len(),
                    parity_block_bits: CRC4_BITS,
                })
            }
            CodeKind::Hamming74 => {
                let padded = pad_to_multiple(content, 4);
                let parity = hamming::hamming74_parity_bits(&padded)?;
                Ok(Codeword {
                    content_bits: content.len(),
                    payload_bits: padded,
                    parity_bits: parity,
                    symbol_width: 1,
                    data_block_bits: 4,
                    parity_block_bits: 3,
                })
            }
            CodeKind::ReedSolomon { symbol_bits, .. } => {
                let rs = self.rs.as_ref().expect("rs tables present");
                let dbb = self.data_block_bits();
                let padded = pad_to_multiple(content, dbb);
                let mut parity = Vec::new();
                for block in padded.chunks(dbb) {
                    let msg = bits_to_symbols(block, symbol_bits);
                    let cw = rs.encode(&msg)?;
                    let parity_syms = &cw[rs.k()..];
                    parity.extend(symbols_to_bits(parity_syms, symbol_bits));
                }
                Ok(Codeword {
                    content_bits: content.len(),
                    payload_bits: padded,
                    parity_bits: parity,
                    symbol_width: symbol_bits,
                    data_block_bits: dbb,
                    parity_block_bits: self.parity_block_bits(),
                })
            }
        }
    }

    /// Reassembles the transmit layout from separately held data and parity
    /// bit streams (per block: data then parity). The inverse of splitting a
    /// [`Codeword`] into its two parts.
    pub fn interleave_blocks(&self, data: &[u8], parity: &[u8]) -> Result<Vec<u8>> {
        match self.kind {
            CodeKind::None => Ok(data.to_vec()),
            CodeKind::Crc4 | CodeKind::Hamming74 | CodeKind::ReedSolomon { .. } => {
                let dbb = if self.kind == CodeKind::Crc4 { data.len() } else { self.data_block_bits() };
                let pbb = self.parity_block_bits();
                if dbb == 0 || !data.len().is_multiple_of(dbb) {
                    return Err(Error::param("data", "length does not match the code's block size"));
                }
                let blocks = data.len() / dbb;
                if parity.len() != blocks * pbb {
                    return Err(Error::LengthMismatch {
                        context: "parity stream",
                        expected: blocks * pbb,
                        got: parity.len(),
                    });
                }
                let mut out = Vec::with_capacity(data.len() + parity.len());
                for i in 0..blocks {
                    out.extend_from_slice(&data[i * dbb..(i + 1) * dbb]);
                    out.extend_from_slice(&parity[i * pbb..(i + 1) * pbb]);
                }
                Ok(out)
            }
        }
    }

    /// Decodes a coded frame produced by [`CodeSpec::encode_frame`].
    ///
    /// Always returns best-effort content (the received systematic bits when
    /// correction fails) so bit error rates can be measured past failures.
    pub fn decode_frame(&self, coded: &[u8], content_bits: usize) -> Result<DecodedFrame> {
        let expected = self.coded_len(content_bits);
        if coded.len() != expected {
            return Err(Error::LengthMismatch {
                context: "coded frame",
                expected,
                got: coded.len(),
            });
        }
        match self.kind {
            CodeKind::None => Ok(DecodedFrame {
                content: coded.to_vec(),
                status: FecStatus::Clean,
            }),
            CodeKind::Crc4 => {
                let ok = crc4::crc4_check(coded)?;
                Ok(DecodedFrame {
                    content: coded[..content_bits].to_vec(),
                    status: if ok { FecStatus::Clean } else { FecStatus::Failure },
                })
            }
            CodeKind::Hamming74 => {
                let mut content = Vec::with_capacity(content_bits.div_ceil(4) * 4);
                let mut status = FecStatus::Clean;
                for block in coded.chunks(7) {
                    let (data, s) = hamming::hamming74_decode(block)?;
                    if s == HammingStatus::Corrected {
                        status = status.merge_corrected(1);
                    }
                    content.extend_from_slice(&data);
                }
                content.truncate(content_bits);
                Ok(DecodedFrame { content, status })
            }
            CodeKind::ReedSolomon { symbol_bits, .. } => {
                let rs = self.rs.as_ref().expect("rs tables present");
                let block_bits = self.data_block_bits() + self.parity_block_bits();
                let mut content = Vec::with_capacity(content_bits.div_ceil(4) * 4);
                let mut status = FecStatus::Clean;
                for block in coded.chunks(block_bits) {
                    let symbols = bits_to_symbols(block, symbol_bits);
                    let (msg, s) = rs.decode(&symbols)?;
                    content.extend(symbols_to_bits(&msg, symbol_bits));
                    status = match s {
                        RsStatus::Clean => status,
                        RsStatus::Corrected(c) => status.merge_corrected(c),
                        RsStatus::Failure => FecStatus::Failure,
                    };
                }
                content.truncate(content_bits);
                Ok(DecodedFrame { content, status })
            }
        }
    }
}

/// Systematic codeword: payload bits (with any block padding) kept apart
/// from the redundancy bits, so incremental-redundancy protocols can send
/// either part alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    content_bits: usize,
    payload_bits: Vec<u8>,
    parity_bits: Vec<u8>,
    symbol_width: u32,
    data_block_bits: usize,
    parity_block_bits: usize,
}

impl Codeword {
    /// Original (unpadded) content length in bits.
    pub fn content_bits(&self) -> usize {
        self.content_bits
    }

    /// Systematic data bits as transmitted (content plus block padding).
    pub fn payload_bits(&self) -> &[u8] {
        &self.payload_bits
    }

    /// Redundancy bits, concatenated block by block.
    pub fn parity_bits(&self) -> &[u8] {
        &self.parity_bits
    }

    /// Bits per code symbol (1 for binary codes).
    pub fn symbol_width(&self) -> u32 {
        self.symbol_width
    }

    /// Serialized transmit order: per block, data bits then parity bits.
    pub fn to_bits(&self) -> Vec<u8> {
        if self.parity_block_bits == 0 {
            return self.payload_bits.clone();
        }
        let blocks = self.payload_bits.len() / self.data_block_bits.max(1);
        let mut out =
            Vec::with_capacity(self.payload_bits.len() + self.parity_bits.len());
        for i in 0..blocks.max(1) {
            let d0 = i * self.data_block_bits;
            let p0 = i * self.parity_block_bits;
            out.extend_from_slice(
                &self.payload_bits[d0..(d0 + self.data_block_bits).min(self.payload_bits.len())],
            );
            out.extend_from_slice(
                &self.parity_bits[p0..(p0 + self.parity_block_bits).min(self.parity_bits.len())],
            );
        }
        out
    }
}

/// Result of decoding one coded frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedFrame {
    /// Best-effort content bits.
    pub content: Vec<u8>,
    pub status: FecStatus,
}

/// Frame-level decode status across all blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FecStatus {
    Clean,
    Corrected(usize),
    Failure,
}

impl FecStatus {
    pub fn is_ok(&self) -> bool {
        !matches!(self, FecStatus::Failure)
    }

    fn merge_corrected(self, count: usize) -> FecStatus {
        match self {
            FecStatus::Clean => FecStatus::Corrected(count),
            FecStatus::Corrected(c) => FecStatus::Corrected(c + count),
            FecStatus::Failure => FecStatus::Failure,
        }
    }
}

fn pad_to_multiple(bits: &[u8], block: usize) -> Vec<u8> {
    let mut padded = bits.to_vec();
    let rem = padded.len() % block;
    if rem != 0 {
        padded.resize(padded.len() + block - rem, 0);
    }
    padded
}

/// Packs a bit sequence into field symbols, most significant bit first.
pub fn bits_to_symbols(bits: &[u8], symbol_bits: u32) -> Vec<u16> {
    bits.chunks(symbol_bits as usize)
        .map(|chunk| {
            let mut v = 0u16;
            for &b in chunk {
                v = (v << 1) | u16::from(b & 1);
            }
            // A ragged final chunk behaves as if zero-padded on the right.
            v << (symbol_bits as usize - chunk.len())
        })
        .collect()
}

/// Unpacks field symbols back into bits, most significant bit first.
pub fn symbols_to_bits(symbols: &[u16], symbol_bits: u32) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * symbol_bits as usize);
    for &s in symbols {
        for i in (0..symbol_bits).rev() {
            bits.push(((s >> i) & 1) as u8);
        }
    }
    bits
}
