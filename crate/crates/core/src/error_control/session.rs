//! Protocol session engine: runs one payload through the configured
//! strategy over a topology, producing a transmission log and link tallies.

use super::frame::{
    build_ack_bits, parse_ack_bits, AckErrorModel, Frame, FrameKind, ACK_FRAME_BITS,
    SEQ_MODULUS,
};
use super::{ProtocolConfig, Strategy, TransmissionLog};
use crate::codecs::crc4::{crc4_append, crc4_check};
use crate::codecs::{CodeKind, CodeSpec};
use crate::cooperation::{
    simulate_frame, transmit_over_link, EventClass, FrameProcessor, PathDecode, TopologyModel,
};
use crate::energy::{attempt_energy, EnergyParams};
use crate::modem::ModulationSpec;
use crate::rng::{StreamTag, TrialStreams};
use crate::Result;

/// Immutable inputs shared by every session at one operating point.
#[derive(Debug, Clone)]
pub struct SessionParams<'a> {
    pub config: &'a ProtocolConfig,
    pub model: &'a TopologyModel,
    pub modulation: ModulationSpec,
    pub energy: &'a EnergyParams,
    /// Charge feedback frames at the direct-link rate (off by default: the
    /// analytic energy expressions carry no feedback term).
    pub charge_ack_energy: bool,
    /// Per-attempt round trip added to the frame airtime.
    pub round_trip_s: f64,
}

/// Scripted outcome of one transmission (data or feedback).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaultAction {
    #[default]
    Pass,
    /// The transmission never arrives; the far side stays silent.
    Drop,
    /// The transmission arrives too damaged for any check to pass.
    Corrupt,
}

/// Fault schedule indexed by transmission ordinal; `Pass` beyond the end.
#[derive(Debug, Clone, Default)]
pub struct FaultPlan {
    pub data: Vec<FaultAction>,
    pub ack: Vec<FaultAction>,
}

#[derive(Debug, Default)]
struct FaultCursor {
    data: usize,
    ack: usize,
}

impl FaultPlan {
    fn next_data(&self, cursor: &mut FaultCursor) -> FaultAction {
        let a = self.data.get(cursor.data).copied().unwrap_or_default();
        cursor.data += 1;
        a
    }

    fn next_ack(&self, cursor: &mut FaultCursor) -> FaultAction {
        let a = self.ack.get(cursor.ack).copied().unwrap_or_default();
        cursor.ack += 1;
        a
    }
}

/// Receiver-side state that persists across the frames of a stream:
/// the next expected sequence number and everything accepted so far.
#[derive(Debug, Clone)]
pub struct ReceiverState {
    pub expected_seq: u8,
    pub accepted: Vec<Vec<u8>>,
}

impl ReceiverState {
    pub fn new() -> Self {
        ReceiverState { expected_seq: 0, accepted: Vec::new() }
    }
}

impl Default for ReceiverState {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-link decode tallies accumulated over a session's attempts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkTallies {
    pub sd_attempts: u64,
    pub sd_failures: u64,
    pub sr_attempts: [u64; 2],
    pub sr_failures: [u64; 2],
    pub rd_attempts: [u64; 2],
    pub rd_failures: [u64; 2],
    pub sd_symbol_errors: u64,
    pub sd_symbols: u64,
}

/// Everything one session produced.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub log: TransmissionLog,
    /// Payload the receiver accepted, if any.
    pub delivered_payload: Option<Vec<u8>>,
    /// What the receiver would read off its best direct observation when
    /// nothing was accepted.
    pub best_effort_payload: Vec<u8>,
    pub tallies: LinkTallies,
}

/// What one attempt puts on the air.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttemptKind {
    /// A full coded frame, decodable on its own.
    Coded,
    /// Detection-only body (type-2 first attempt).
    PlainBody,
    /// Redundancy bits to combine with the stored body (type-2 second
    /// attempt).
    ParityIncrement,
}

/// Per-receiver combining state for incremental redundancy.
#[derive(Debug, Clone, Default)]
struct CombinerState {
    stored_body: Option<Vec<u8>>,
}

/// Decode surface handed to the transport; stateful per receiver so the
/// destination and each relay combine independently.
struct SessionProcessor<'a> {
    code: &'a CodeSpec,
    detector: &'a CodeSpec,
    body_bits: usize,
    content_bits: usize,
    attempt_kind: AttemptKind,
    dest: CombinerState,
    relays: [CombinerState; 2],
}

impl<'a> SessionProcessor<'a> {
    fn new(cfg: &'a ProtocolConfig) -> Self {
        SessionProcessor {
            code: &cfg.code,
            detector: &cfg.detector,
            body_bits: cfg.body_bits(),
            content_bits: cfg.content_bits(),
            attempt_kind: AttemptKind::Coded,
            dest: CombinerState::default(),
            relays: [CombinerState::default(), CombinerState::default()],
        }
    }

    fn check_body(&self, body: &[u8]) -> bool {
        match self.detector.kind() {
            CodeKind::Crc4 => crc4_check(body).unwrap_or(false),
            _ => true,
        }
    }

    fn decode_standalone(&self, rx: &[u8]) -> PathDecode {
        match self.code.decode_frame(rx, self.body_bits) {
            Ok(out) => {
                let accepted = out.status.is_ok() && self.check_body(&out.content);
                let content = out.content[..self.content_bits.min(out.content.len())].to_vec();
                PathDecode { content, accepted }
            }
            Err(_) => PathDecode { content: vec![0; self.content_bits], accepted: false },
        }
    }

    fn decode_with_state(&mut self, path: usize, rx: &[u8]) -> PathDecode {
        let kind = self.attempt_kind;
        let state = if path == 0 { &mut self.dest } else { &mut self.relays[path - 1] };
        match kind {
            AttemptKind::Coded => self.decode_standalone(rx),
            AttemptKind::PlainBody => {
                state.stored_body = Some(rx.to_vec());
                let body = &rx[..self.body_bits.min(rx.len())];
                let accepted = body.len() == self.body_bits && self.check_body(body);
                PathDecode {
                    content: body[..self.content_bits.min(body.len())].to_vec(),
                    accepted,
                }
            }
            AttemptKind::ParityIncrement => {
                let stored = state.stored_body.clone();
                match stored {
                    Some(data) => match self.code.interleave_blocks(&data, rx) {
                        Ok(coded) => self.decode_standalone(&coded),
                        Err(_) => {
                            PathDecode { content: vec![0; self.content_bits], accepted: false }
                        }
                    },
                    None => PathDecode { content: vec![0; self.content_bits], accepted: false },
                }
            }
        }
    }

    fn encode_full(&self, content: &[u8]) -> Vec<u8> {
        let body = match self.detector.kind() {
            CodeKind::Crc4 => crc4_append(content).expect("content is non-empty"),
            _ => content.to_vec(),
        };
        self.code
            .encode_frame(&body)
            .expect("re-encoding recovered content")
            .to_bits()
    }
}

impl FrameProcessor for SessionProcessor<'_> {
    fn decode_direct(&mut self, rx: &[u8]) -> PathDecode {
        self.decode_with_state(0, rx)
    }

    fn decode_relay(&mut self, relay: usize, rx: &[u8]) -> PathDecode {
        self.decode_with_state(relay + 1, rx)
    }

    fn forwarded_bits(&self, content: &[u8]) -> Vec<u8> {
        self.encode_full(content)
    }

    fn decode_forwarded(&mut self, rx: &[u8]) -> PathDecode {
        self.decode_standalone(rx)
    }
}

/// Runs one payload through the configured strategy.
///
/// `seq` is the frame's sequence number; `receiver` carries the expected
/// counter (and accepted history) across frames of a stream. Faults, when
/// given, script data/feedback losses for targeted tests.
pub fn run_session(
    params: &SessionParams<'_>,
    payload: &[u8],
    seq: u8,
    receiver: &mut ReceiverState,
    streams: &TrialStreams,
    faults: Option<&FaultPlan>,
) -> Result<SessionOutcome> {
    run_session_inner(params, payload, seq, receiver, streams, faults, &mut FaultCursor::default())
}

fn run_session_inner(
    params: &SessionParams<'_>,
    payload: &[u8],
    seq: u8,
    receiver: &mut ReceiverState,
    streams: &TrialStreams,
    faults: Option<&FaultPlan>,
    cursor: &mut FaultCursor,
) -> Result<SessionOutcome> {
    let cfg = params.config;
    cfg.validate()?;
    if payload.len() != cfg.payload_bits {
        return Err(crate::Error::LengthMismatch {
            context: "session payload",
            expected: cfg.payload_bits,
            got: payload.len(),
        });
    }

    let uses_feedback = cfg.strategy.uses_feedback();
    let seq = seq % SEQ_MODULUS;
    let content = if uses_feedback {
        Frame::data(seq, 0, payload.to_vec()).content_bits()
    } else {
        payload.to_vec()
    };
    let body = match cfg.detector.kind() {
        CodeKind::Crc4 => crc4_append(&content)?,
        _ => content.clone(),
    };
    let codeword = cfg.code.encode_frame(&body)?;

    let plan = |attempt: u32| -> (Vec<u8>, AttemptKind) {
        if cfg.strategy == Strategy::HarqType2 {
            match attempt {
                0 => (codeword.payload_bits().to_vec(), AttemptKind::PlainBody),
                1 => (codeword.parity_bits().to_vec(), AttemptKind::ParityIncrement),
                _ => (codeword.to_bits(), AttemptKind::Coded),
            }
        } else {
            (codeword.to_bits(), AttemptKind::Coded)
        }
    };

    let max_attempts = if uses_feedback { cfg.max_retransmissions + 1 } else { 1 };
    let mut processor = SessionProcessor::new(cfg);

    let mut log = TransmissionLog {
        attempts: 0,
        delivered: false,
        duplicate_delivered: false,
        data_bits_sent: 0,
        control_bits_sent: 0,
        elapsed_s: 0.0,
        energy_j: 0.0,
        energy_events: Vec::new(),
        attempt_bits: Vec::new(),
        attempt_elapsed_s: Vec::new(),
        payload_bits: payload.len() as u64,
    };
    let mut tallies = LinkTallies::default();
    let mut delivered_payload: Option<Vec<u8>> = None;
    let mut best_effort = vec![0u8; payload.len()];
    let default_plan = FaultPlan::default();
    let faults = faults.unwrap_or(&default_plan);

    for attempt in 0..max_attempts {
        log.attempts += 1;
        let (bits, kind) = plan(attempt);
        processor.attempt_kind = kind;
        log.data_bits_sent += bits.len() as u64;
        log.attempt_bits.push(bits.len() as u64);

        let action = faults.next_data(cursor);
        let mut dest_content: Option<Vec<u8>> = None;
        match action {
            FaultAction::Drop => {
                log.energy_events.push(EventClass::AllPathsFailed);
                log.energy_j += attempt_energy(
                    params.energy,
                    params.model.kind,
                    EventClass::AllPathsFailed,
                    bits.len() as u64,
                )?;
            }
            FaultAction::Pass | FaultAction::Corrupt => {
                let out = simulate_frame(
                    params.model,
                    &bits,
                    params.modulation,
                    &mut processor,
                    streams,
                    attempt,
                )?;
                tallies.sd_attempts += 1;
                tallies.sd_failures += u64::from(!out.sd_decoded);
                tallies.sd_symbol_errors += out.sd_symbol_errors;
                tallies.sd_symbols += out.sd_symbols;
                for (i, &ok) in out.sr_decoded.iter().enumerate() {
                    tallies.sr_attempts[i] += 1;
                    tallies.sr_failures[i] += u64::from(!ok);
                }
                for (i, &ok) in out.rd_decoded.iter().enumerate() {
                    tallies.rd_attempts[i] += 1;
                    tallies.rd_failures[i] += u64::from(!ok);
                }
                log.energy_events.push(out.event);
                log.energy_j += attempt_energy(
                    params.energy,
                    params.model.kind,
                    out.event,
                    bits.len() as u64,
                )?;
                if out.direct_best_effort.len() >= processor.content_bits {
                    let start = processor.content_bits - payload.len();
                    best_effort = out.direct_best_effort[start..processor.content_bits].to_vec();
                }
                if action == FaultAction::Pass {
                    dest_content = out.delivered;
                }
            }
        }

        if !uses_feedback {
            // One shot: delivery is whatever the single attempt produced.
            if let Some(content) = dest_content {
                log.delivered = true;
                delivered_payload = Some(content);
            }
            let spent = params.energy.tx_time_s(bits.len() as u64);
            log.elapsed_s += spent;
            log.attempt_elapsed_s.push(spent);
            break;
        }

        // Receiver side: deliver in order, suppress duplicates, reply.
        let reply: Option<(FrameKind, u8)> = if action == FaultAction::Drop {
            None
        } else if let Some(content) = dest_content {
            let frame = Frame::parse_content(&content)?;
            if frame.seq_num == receiver.expected_seq {
                if delivered_payload.is_some() {
                    log.duplicate_delivered = true;
                }
                receiver.accepted.push(frame.payload.clone());
                delivered_payload = Some(frame.payload);
                log.delivered = true;
                receiver.expected_seq = (receiver.expected_seq + 1) % SEQ_MODULUS;
            }
            // Anything else is a duplicate of an already-delivered frame;
            // re-acknowledge without delivering.
            Some((FrameKind::Ack, receiver.expected_seq))
        } else {
            Some((FrameKind::Nack, receiver.expected_seq))
        };

        let spent = params.energy.tx_time_s(bits.len() as u64) + params.round_trip_s;
        log.elapsed_s += spent;
        log.attempt_elapsed_s.push(spent);

        let mut acked = false;
        if let Some((kind, nfe)) = reply {
            log.control_bits_sent += ACK_FRAME_BITS as u64;
            if params.charge_ack_energy {
                log.energy_j += attempt_energy(
                    params.energy,
                    crate::cooperation::TopologyKind::Dt,
                    EventClass::DirectSuccess,
                    ACK_FRAME_BITS as u64,
                )?;
            }
            let seen = match faults.next_ack(cursor) {
                FaultAction::Drop | FaultAction::Corrupt => None,
                FaultAction::Pass => match cfg.ack_error_model {
                    AckErrorModel::Ideal => Some((kind, nfe)),
                    AckErrorModel::SameChannel => {
                        let bits = build_ack_bits(kind, nfe);
                        let mut rng = streams.stream(StreamTag::Ack, attempt);
                        let rx = transmit_over_link(
                            &bits,
                            params.modulation,
                            params.model.sd,
                            &mut rng,
                        )?;
                        parse_ack_bits(&rx.bits)
                    }
                },
            };
            match seen {
                Some((FrameKind::Ack, nfe)) if nfe == (seq + 1) % SEQ_MODULUS => acked = true,
                _ => {}
            }
        }

        if acked {
            break;
        }
    }

    Ok(SessionOutcome {
        log,
        best_effort_payload: delivered_payload.clone().unwrap_or(best_effort),
        delivered_payload,
        tallies,
    })
}

/// Runs a sequence of payloads through one shared receiver, frame by frame.
/// Returns the per-frame outcomes; the accepted payloads accumulate in
/// `receiver.accepted`. Stops early when a frame exhausts its retries, as a
/// stop-and-wait sender cannot skip past an unacknowledged frame.
pub fn run_stream(
    params: &SessionParams<'_>,
    payloads: &[Vec<u8>],
    master_seed: u64,
    receiver: &mut ReceiverState,
    faults: Option<&FaultPlan>,
) -> Result<Vec<SessionOutcome>> {
    let mut outcomes = Vec::with_capacity(payloads.len());
    let mut cursor = FaultCursor::default();
    let default_plan = FaultPlan::default();
    let plan = faults.unwrap_or(&default_plan);
    for (i, payload) in payloads.iter().enumerate() {
        let streams = TrialStreams::new(master_seed, 0, i as u64);
        let outcome = run_session_inner(
            params,
            payload,
            (i % SEQ_MODULUS as usize) as u8,
            receiver,
            &streams,
            Some(plan),
            &mut cursor,
        )?;
        let exhausted = !outcome.log.delivered;
        outcomes.push(outcome);
        if exhausted {
            break;
        }
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooperation::{LinkModel, TopologyKind};

    fn energy_params(frame_bits: u64) -> EnergyParams {
        EnergyParams {
            tx_power_w: 1.0,
            amplifier_loss: 0.5,
            tx_circuit_w: 0.1,
            rx_circuit_w: 0.1,
            frame_bits,
            payload_bits: 88,
            bit_rate_bps: 1e6,
            symbol_rate_baud: 5e5,
        }
    }

    fn sw_arq_config() -> ProtocolConfig {
        ProtocolConfig {
            strategy: Strategy::SwArq,
            code: CodeSpec::none(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 16,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        }
    }

    fn payload(bits: usize, seed: u64) -> Vec<u8> {
        use rand::Rng;
        let mut rng = TrialStreams::new(seed, 0, 0).stream(StreamTag::Payload, 0);
        (0..bits).map(|_| rng.gen::<bool>() as u8).collect()
    }

    fn run_once(
        cfg: &ProtocolConfig,
        model: &TopologyModel,
        faults: Option<&FaultPlan>,
        seed: u64,
    ) -> SessionOutcome {
        let energy = energy_params(cfg.coded_frame_bits() as u64);
        let params = SessionParams {
            config: cfg,
            model,
            modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
            energy: &energy,
            charge_ack_energy: false,
            round_trip_s: 16e-6,
        };
        let p = payload(cfg.payload_bits, seed);
        let mut rx = ReceiverState::new();
        let streams = TrialStreams::new(seed, 0, 0);
        let out = run_session(&params, &p, 0, &mut rx, &streams, faults).unwrap();
        if let Some(d) = &out.delivered_payload {
            assert_eq!(d, &p, "delivered payload must match what was sent");
        }
        out
    }

    #[test]
    fn noiseless_sw_arq_delivers_first_try() {
        let cfg = sw_arq_config();
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let out = run_once(&cfg, &model, None, 1);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 1);
        assert!(!out.log.duplicate_delivered);
        assert_eq!(out.log.control_bits_sent, 16);
        assert_eq!(out.log.data_bits_sent, cfg.coded_frame_bits() as u64);
    }

    #[test]
    fn lost_ack_forces_retransmission_without_duplicate_delivery() {
        let cfg = sw_arq_config();
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let faults = FaultPlan { data: vec![], ack: vec![FaultAction::Drop] };
        let out = run_once(&cfg, &model, Some(&faults), 2);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 2);
        assert!(!out.log.duplicate_delivered);
    }

    #[test]
    fn corrupted_data_triggers_nack_and_retry() {
        let cfg = sw_arq_config();
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let faults = FaultPlan { data: vec![FaultAction::Corrupt], ack: vec![] };
        let out = run_once(&cfg, &model, Some(&faults), 3);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 2);
    }

    #[test]
    fn retry_exhaustion_is_an_outcome_not_an_error() {
        let mut cfg = sw_arq_config();
        cfg.max_retransmissions = 3;
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::FrameError(1.0));
        let out = run_once(&cfg, &model, None, 4);
        assert!(!out.log.delivered);
        assert_eq!(out.log.attempts, 4);
        assert_eq!(out.log.energy_events.len(), 4);
    }

    #[test]
    fn fec_only_is_single_shot() {
        let cfg = ProtocolConfig {
            strategy: Strategy::FecOnly,
            code: CodeSpec::reed_solomon(3, 7, 3).unwrap(),
            detector: CodeSpec::none(),
            max_retransmissions: 9,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let out = run_once(&cfg, &model, None, 5);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 1);
        assert_eq!(out.log.control_bits_sent, 0);

        let dead = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Faded { sigma: 1e-9 });
        let out = run_once(&cfg, &dead, None, 6);
        assert_eq!(out.log.attempts, 1, "one shot regardless of channel");
    }

    #[test]
    fn harq_t1_corrects_single_flips_on_first_attempt() {
        let cfg = ProtocolConfig {
            strategy: Strategy::HarqType1,
            code: CodeSpec::hamming74(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 4,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        // One bit flipped at the head of the frame: inside a single 7-bit
        // block, so the inner code repairs it and the CRC passes.
        let model = TopologyModel {
            kind: TopologyKind::Dt,
            sd: LinkModel::BitFlip(0.0),
            sr: vec![],
            rd: vec![],
        };
        // Use the scripted corrupt action to verify the NACK path instead:
        let faults = FaultPlan { data: vec![FaultAction::Corrupt], ack: vec![] };
        let out = run_once(&cfg, &model, Some(&faults), 7);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 2);
    }

    #[test]
    fn harq_t1_delivers_first_try_despite_channel_corruption() {
        let cfg = ProtocolConfig {
            strategy: Strategy::HarqType1,
            code: CodeSpec::hamming74(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 4,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        let energy = energy_params(cfg.coded_frame_bits() as u64);
        let model = TopologyModel {
            kind: TopologyKind::Dt,
            sd: LinkModel::BitFlip(0.002),
            sr: vec![],
            rd: vec![],
        };
        let params = SessionParams {
            config: &cfg,
            model: &model,
            modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
            energy: &energy,
            charge_ack_energy: false,
            round_trip_s: 16e-6,
        };
        // Find trials where the channel did corrupt symbols and the inner
        // code still delivered on the first attempt.
        let mut corrected_first_try = false;
        for seed in 0..200u64 {
            let p = payload(cfg.payload_bits, seed);
            let mut rx = ReceiverState::new();
            let streams = TrialStreams::new(seed, 0, 0);
            let out = run_session(&params, &p, 0, &mut rx, &streams, None).unwrap();
            if out.log.delivered
                && out.log.attempts == 1
                && out.tallies.sd_symbol_errors > 0
            {
                assert_eq!(out.delivered_payload.as_ref(), Some(&p));
                corrected_first_try = true;
                break;
            }
        }
        assert!(corrected_first_try, "no corrupted-yet-delivered first attempt found");
    }

    #[test]
    fn harq_t2_sends_detection_first_then_parity() {
        let cfg = ProtocolConfig {
            strategy: Strategy::HarqType2,
            code: CodeSpec::hamming74(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 4,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let out = run_once(&cfg, &model, None, 8);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 1);
        // Clean first attempt carries the body only: header + payload + crc,
        // there are 100 such bits, and no parity ever flies.
        assert_eq!(out.log.data_bits_sent, 100);

        // A corrupted first attempt pulls in the 75-bit parity increment.
        let faults = FaultPlan { data: vec![FaultAction::Corrupt], ack: vec![] };
        let out = run_once(&cfg, &model, Some(&faults), 9);
        assert!(out.log.delivered);
        assert_eq!(out.log.attempts, 2);
        assert_eq!(out.log.data_bits_sent, 100 + 75);
    }

    #[test]
    fn harq_t2_combines_stored_body_with_increment() {
        let cfg = ProtocolConfig {
            strategy: Strategy::HarqType2,
            code: CodeSpec::hamming74(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 4,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        // First attempt arrives with one flipped bit (CRC fails); the parity
        // increment then repairs it without a full resend.
        let energy = energy_params(cfg.coded_frame_bits() as u64);
        let model = TopologyModel {
            kind: TopologyKind::Dt,
            sd: LinkModel::BitFlip(0.004),
            sr: vec![],
            rd: vec![],
        };
        let params = SessionParams {
            config: &cfg,
            model: &model,
            modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
            energy: &energy,
            charge_ack_energy: false,
            round_trip_s: 16e-6,
        };
        // Find a seed where attempt 1 has exactly one flip and the
        // increment lands clean; then delivery happens at attempt 2 via
        // combining (data bits = body + parity, not body + full codeword).
        let mut combined_delivery_seen = false;
        for seed in 0..400u64 {
            let p = payload(cfg.payload_bits, seed);
            let mut rx = ReceiverState::new();
            let streams = TrialStreams::new(seed, 0, 0);
            let out = run_session(&params, &p, 0, &mut rx, &streams, None).unwrap();
            if out.log.delivered && out.log.attempts == 2 {
                assert_eq!(out.log.data_bits_sent, 175);
                assert_eq!(out.delivered_payload.as_ref(), Some(&p));
                combined_delivery_seen = true;
                break;
            }
        }
        assert!(combined_delivery_seen, "no trial delivered via combining");
    }

    #[test]
    fn attempt_log_lines_carry_uneven_increment_sizes() {
        let cfg = ProtocolConfig {
            strategy: Strategy::HarqType2,
            code: CodeSpec::hamming74(),
            detector: CodeSpec::crc4(),
            max_retransmissions: 4,
            timeout_s: None,
            ack_error_model: AckErrorModel::Ideal,
            payload_bits: 88,
        };
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let faults = FaultPlan {
            data: vec![FaultAction::Corrupt, FaultAction::Corrupt],
            ack: vec![],
        };
        let out = run_once(&cfg, &model, Some(&faults), 10);
        assert_eq!(out.log.attempts, 3);
        // Body, parity increment, then the full codeword.
        assert_eq!(out.log.attempt_bits, vec![100, 75, 175]);
        let lines = super::super::attempt_log_lines(3, &out.log);
        let fields: Vec<Vec<&str>> =
            lines.lines().map(|l| l.split(',').collect()).collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0][4], "100");
        assert_eq!(fields[1][4], "75");
        assert_eq!(fields[2][4], "175");
        assert_eq!(fields[2][3], "delivered");
    }

    #[test]
    fn stream_delivers_in_order_without_duplicates() {
        let cfg = sw_arq_config();
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
        let energy = energy_params(cfg.coded_frame_bits() as u64);
        let params = SessionParams {
            config: &cfg,
            model: &model,
            modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
            energy: &energy,
            charge_ack_energy: false,
            round_trip_s: 16e-6,
        };
        let payloads: Vec<Vec<u8>> = (0..20).map(|i| payload(88, 100 + i)).collect();
        let faults = FaultPlan {
            data: vec![FaultAction::Pass, FaultAction::Corrupt, FaultAction::Drop],
            ack: vec![FaultAction::Drop, FaultAction::Pass, FaultAction::Corrupt],
        };
        let mut rx = ReceiverState::new();
        let outcomes = run_stream(&params, &payloads, 77, &mut rx, Some(&faults)).unwrap();
        assert_eq!(outcomes.len(), 20);
        assert!(outcomes.iter().all(|o| o.log.delivered));
        assert!(outcomes.iter().all(|o| !o.log.duplicate_delivered));
        assert_eq!(rx.accepted, payloads);
    }
}
