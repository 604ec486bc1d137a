//! Error-control strategies over any topology: plain forward error
//! correction, stop-and-wait ARQ, and hybrid ARQ in its always-coded
//! (type 1) and incremental-redundancy (type 2) forms.
//!
//! Each protocol session is one sequential state machine producing an
//! immutable [`TransmissionLog`]; many sessions run concurrently as long as
//! each owns its random streams.

mod frame;
mod session;

pub use frame::{
    build_ack_bits, parse_ack_bits, AckErrorModel, Frame, FrameKind, ACK_FRAME_BITS, HEADER_BITS,
    SEQ_MODULUS,
};
pub use session::{
    run_session, run_stream, FaultAction, FaultPlan, ReceiverState, SessionOutcome, SessionParams,
};

use crate::codecs::{CodeKind, CodeSpec};
use crate::cooperation::EventClass;
use crate::error::Error;
use crate::Result;

/// Error-control strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One shot, correction only; no feedback channel.
    FecOnly,
    /// Stop-and-wait ARQ: detection plus retransmission.
    SwArq,
    /// Every attempt carries correction and detection.
    HarqType1,
    /// First attempt carries detection only; redundancy follows on demand.
    HarqType2,
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::FecOnly => "fec",
            Strategy::SwArq => "sw-arq",
            Strategy::HarqType1 => "harq-t1",
            Strategy::HarqType2 => "harq-t2",
        }
    }

    /// Whether the receiver feeds acknowledgements back.
    pub fn uses_feedback(&self) -> bool {
        !matches!(self, Strategy::FecOnly)
    }
}

/// Full protocol configuration for a session family.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub strategy: Strategy,
    /// Error-correcting code (may be none for plain ARQ).
    pub code: CodeSpec,
    /// Error-detecting code protecting the frame content.
    pub detector: CodeSpec,
    pub max_retransmissions: u32,
    /// Sender timer for lost replies; defaults to twice the frame airtime
    /// plus a processing epsilon when unset.
    pub timeout_s: Option<f64>,
    pub ack_error_model: AckErrorModel,
    pub payload_bits: usize,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.payload_bits == 0 {
            return Err(Error::param("payload_bits", "must be > 0"));
        }
        if !matches!(self.detector.kind(), CodeKind::None | CodeKind::Crc4) {
            return Err(Error::InvalidConfig(
                "detector must be `none` or `crc4`".into(),
            ));
        }
        match self.strategy {
            Strategy::FecOnly => {}
            Strategy::SwArq => {
                if self.detector.is_none() {
                    return Err(Error::InvalidConfig(
                        "sw-arq requires a detector so the receiver can acknowledge".into(),
                    ));
                }
            }
            Strategy::HarqType1 | Strategy::HarqType2 => {
                if self.detector.is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "{} requires a detector (crc4)",
                        self.strategy.label()
                    )));
                }
                if self.code.is_none() || self.code.kind() == CodeKind::Crc4 {
                    return Err(Error::InvalidConfig(format!(
                        "{} requires an error-correcting code",
                        self.strategy.label()
                    )));
                }
            }
        }
        if let Some(t) = self.timeout_s {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::param("timeout", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Content bits of one data frame: header plus payload for feedback
    /// strategies, bare payload for one-shot FEC.
    pub fn content_bits(&self) -> usize {
        if self.strategy.uses_feedback() {
            HEADER_BITS + self.payload_bits
        } else {
            self.payload_bits
        }
    }

    /// Body bits: content plus detector overhead.
    pub fn body_bits(&self) -> usize {
        self.content_bits() + self.detector.parity_block_bits()
    }

    /// Coded frame bits of a full (first-attempt or type-1) transmission.
    pub fn coded_frame_bits(&self) -> usize {
        self.code.coded_len(self.body_bits())
    }

    /// Resolved sender timeout.
    pub fn resolved_timeout_s(&self, bit_rate_bps: f64) -> f64 {
        self.timeout_s
            .unwrap_or(2.0 * self.coded_frame_bits() as f64 / bit_rate_bps + 1e-6)
    }
}

/// Outcome record of one protocol session (one payload).
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionLog {
    /// Data transmissions performed (1 = no retransmission).
    pub attempts: u32,
    /// Whether the receiver accepted the payload.
    pub delivered: bool,
    /// Whether the receiver ever accepted the same payload twice
    /// (sequence-number suppression failed).
    pub duplicate_delivered: bool,
    /// Bits the sender put on the air across all attempts.
    pub data_bits_sent: u64,
    /// Feedback bits (ACK/NACK frames) sent back.
    pub control_bits_sent: u64,
    /// Wall-clock charge: per attempt, frame airtime plus one round trip.
    pub elapsed_s: f64,
    /// Energy charged across attempts, by topology event class.
    pub energy_j: f64,
    /// Event class of every attempt, in order.
    pub energy_events: Vec<EventClass>,
    /// Bits the sender put on the air in each attempt (incremental
    /// redundancy makes these uneven).
    pub attempt_bits: Vec<u64>,
    /// Wall-clock charge of each attempt.
    pub attempt_elapsed_s: Vec<f64>,
    /// Payload bits carried by this session.
    pub payload_bits: u64,
}

impl TransmissionLog {
    /// Data plus control bits.
    pub fn total_bits_sent(&self) -> u64 {
        self.data_bits_sent + self.control_bits_sent
    }
}

/// Aggregate of many session logs.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Delivered payload bits over total elapsed time.
    pub throughput_bps: f64,
    /// Mean elapsed time of delivered sessions (NaN when none delivered).
    pub mean_delay_s: f64,
    /// Delivered sessions over total sessions.
    pub delivery_rate: f64,
}

/// Folds session logs into throughput, delay and delivery rate.
pub fn summarize<'a>(logs: impl IntoIterator<Item = &'a TransmissionLog>) -> Result<Summary> {
    let mut total_elapsed = 0.0;
    let mut delivered_bits = 0u64;
    let mut delivered_elapsed = 0.0;
    let mut delivered = 0u64;
    let mut total = 0u64;
    for log in logs {
        total += 1;
        total_elapsed += log.elapsed_s;
        if log.delivered {
            delivered += 1;
            delivered_bits += log.payload_bits;
            delivered_elapsed += log.elapsed_s;
        }
    }
    if total == 0 {
        return Err(Error::param("logs", "must be non-empty"));
    }
    Ok(Summary {
        throughput_bps: if total_elapsed > 0.0 {
            delivered_bits as f64 / total_elapsed
        } else {
            0.0
        },
        mean_delay_s: if delivered > 0 {
            delivered_elapsed / delivered as f64
        } else {
            f64::NAN
        },
        delivery_rate: delivered as f64 / total as f64,
    })
}

/// Expected stop-and-wait throughput at a fixed per-attempt frame error
/// rate: `payload_bits * (1 - per) / (tx_time + round_trip)`.
///
/// `overhead_bits` records the framing overhead already included in
/// `tx_time`; it participates in validation only.
pub fn sw_arq_throughput_analytic(
    per: f64,
    payload_bits: u64,
    overhead_bits: u64,
    round_trip_s: f64,
    tx_time_s: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&per) {
        return Err(Error::param("per", "must lie in [0, 1]"));
    }
    if payload_bits == 0 {
        return Err(Error::param("payload_bits", "must be > 0"));
    }
    let _ = overhead_bits;
    let cycle = tx_time_s + round_trip_s;
    if !(cycle > 0.0) || !cycle.is_finite() {
        return Err(Error::param("tx_time", "tx_time + round_trip must be > 0"));
    }
    Ok(payload_bits as f64 * (1.0 - per) / cycle)
}

/// Serializes one session's attempts to the line-oriented log format:
/// `session,attempt,event,outcome,bits,elapsed` per attempt.
pub fn attempt_log_lines(session_id: u64, log: &TransmissionLog) -> String {
    let mut out = String::new();
    for (i, event) in log.energy_events.iter().enumerate() {
        let outcome = if i + 1 == log.energy_events.len() {
            if log.delivered {
                "delivered"
            } else {
                "exhausted"
            }
        } else {
            "retry"
        };
        out.push_str(&format!(
            "{session_id},{attempt},{event},{outcome},{bits},{elapsed}\n",
            attempt = i + 1,
            event = event.label(),
            bits = log.attempt_bits.get(i).copied().unwrap_or_default(),
            elapsed = log.attempt_elapsed_s.get(i).copied().unwrap_or_default(),
        ));
    }
    out
}
