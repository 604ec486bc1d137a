//! Frame layouts: data frames carry a sequence number and next-frame-expected
//! counter ahead of the payload; acknowledgement frames are fixed 16-bit
//! control frames protected by the same 4-bit CRC as the data path.

use crate::codecs::crc4::{crc4_append, crc4_check};
use crate::error::Error;
use crate::Result;

/// Bits of sequence header on a data frame: 4 for SeqNum, 4 for NFE.
pub const HEADER_BITS: usize = 8;

/// Sequence numbers count modulo 16 with a send window of one.
pub const SEQ_MODULUS: u8 = 16;

/// Control frames are 16 bits including their CRC.
pub const ACK_FRAME_BITS: usize = 16;

/// Frame role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Data,
    Ack,
    Nack,
}

/// Structured view of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub seq_num: u8,
    /// Next frame expected, piggybacked by the receiver.
    pub nfe: u8,
    pub kind: FrameKind,
    pub payload: Vec<u8>,
    pub check_bits: Vec<u8>,
    /// Which redundancy increment a hybrid type-2 attempt carries
    /// (0 = detection-only body, 1 = parity increment, 2 = full codeword).
    pub fec_increment_id: u8,
}

impl Frame {
    pub fn data(seq_num: u8, nfe: u8, payload: Vec<u8>) -> Self {
        Frame {
            seq_num: seq_num % SEQ_MODULUS,
            nfe: nfe % SEQ_MODULUS,
            kind: FrameKind::Data,
            payload,
            check_bits: Vec::new(),
            fec_increment_id: 0,
        }
    }

    /// Serialized content bits: `[seq:4][nfe:4][payload]`.
    pub fn content_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(HEADER_BITS + self.payload.len());
        push_nibble(&mut bits, self.seq_num);
        push_nibble(&mut bits, self.nfe);
        bits.extend_from_slice(&self.payload);
        bits
    }

    /// Parses content bits back into a data frame.
    pub fn parse_content(bits: &[u8]) -> Result<Frame> {
        if bits.len() < HEADER_BITS {
            return Err(Error::param("content", "shorter than the frame header"));
        }
        Ok(Frame {
            seq_num: nibble(&bits[0..4]),
            nfe: nibble(&bits[4..8]),
            kind: FrameKind::Data,
            payload: bits[HEADER_BITS..].to_vec(),
            check_bits: Vec::new(),
            fec_increment_id: 0,
        })
    }
}

fn push_nibble(bits: &mut Vec<u8>, v: u8) {
    for i in (0..4).rev() {
        bits.push((v >> i) & 1);
    }
}

fn nibble(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
}

/// Whether acknowledgements traverse the reverse faded channel or arrive
/// intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AckErrorModel {
    /// Feedback is never corrupted; isolates forward-link effects.
    Ideal,
    /// Feedback rides the reverse direct link under the same error model
    /// (default).
    #[default]
    SameChannel,
}

impl AckErrorModel {
    pub fn label(&self) -> &'static str {
        match self {
            AckErrorModel::Ideal => "ideal",
            AckErrorModel::SameChannel => "same-channel",
        }
    }
}

/// Builds a 16-bit control frame: `[kind:2][nfe:4][zero pad:6][crc:4]`.
pub fn build_ack_bits(kind: FrameKind, nfe: u8) -> Vec<u8> {
    let kind_code: u8 = match kind {
        FrameKind::Ack => 0b01,
        FrameKind::Nack => 0b10,
        FrameKind::Data => unreachable!("data frames use the data path"),
    };
    let mut bits = Vec::with_capacity(ACK_FRAME_BITS);
    bits.push((kind_code >> 1) & 1);
    bits.push(kind_code & 1);
    push_nibble(&mut bits, nfe % SEQ_MODULUS);
    bits.extend_from_slice(&[0; 6]);
    crc4_append(&bits).expect("control frame body is non-empty")
}

/// Parses a received control frame. `None` when the CRC fails or the kind
/// field is invalid; the sender treats that as a lost reply.
pub fn parse_ack_bits(bits: &[u8]) -> Option<(FrameKind, u8)> {
    if bits.len() != ACK_FRAME_BITS || !crc4_check(bits).ok()? {
        return None;
    }
    let kind = match (bits[0], bits[1]) {
        (0, 1) => FrameKind::Ack,
        (1, 0) => FrameKind::Nack,
        _ => return None,
    };
    Some((kind, nibble(&bits[2..6])))
}
