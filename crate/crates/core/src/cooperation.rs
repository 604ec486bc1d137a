//! Frame transport across the three topologies: direct transmission (DT),
//! single-relay cooperation (SRC) and dual-relay cooperation (MRC), plus the
//! closed-form packet error rate composition for each.
//!
//! Relay discipline is decode-and-forward with the relay pair acting as one
//! decoding stage: when the destination misses the broadcast and at least
//! one relay decodes it, the relay phase runs and every relay-to-destination
//! link carries the recovered frame. The end-to-end failure law of that
//! event structure is exactly the composed expressions below, which is what
//! the energy model weights its cases with.

use crate::channel::{sample_snr, transmit_symbols, LinkSpec};
use crate::error::Error;
use crate::modem::{demap_symbols, map_symbols, ModulationSpec};
use crate::rng::{StreamTag, TrialStreams};
use crate::Result;
use num_complex::Complex64;
use rand::Rng;

/// Which cooperation scheme a topology realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    /// Source to destination only.
    Dt,
    /// One off-path relay.
    Src,
    /// Two off-path relays.
    Mrc,
}

impl TopologyKind {
    pub fn relays(&self) -> usize {
        match self {
            TopologyKind::Dt => 0,
            TopologyKind::Src => 1,
            TopologyKind::Mrc => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TopologyKind::Dt => "dt",
            TopologyKind::Src => "src",
            TopologyKind::Mrc => "mrc",
        }
    }
}

/// Geometry of one topology: the direct link plus per-relay uplinks and
/// downlinks.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    kind: TopologyKind,
    link_sd: LinkSpec,
    link_sr: Vec<LinkSpec>,
    link_rd: Vec<LinkSpec>,
}

impl Topology {
    pub fn direct(link_sd: LinkSpec) -> Result<Self> {
        Self::new(TopologyKind::Dt, link_sd, vec![], vec![])
    }

    pub fn single_relay(link_sd: LinkSpec, link_sr: LinkSpec, link_rd: LinkSpec) -> Result<Self> {
        Self::new(TopologyKind::Src, link_sd, vec![link_sr], vec![link_rd])
    }

    pub fn dual_relay(
        link_sd: LinkSpec,
        link_sr: [LinkSpec; 2],
        link_rd: [LinkSpec; 2],
    ) -> Result<Self> {
        Self::new(TopologyKind::Mrc, link_sd, link_sr.to_vec(), link_rd.to_vec())
    }

    pub fn new(
        kind: TopologyKind,
        link_sd: LinkSpec,
        link_sr: Vec<LinkSpec>,
        link_rd: Vec<LinkSpec>,
    ) -> Result<Self> {
        let relays = kind.relays();
        if link_sr.len() != relays || link_rd.len() != relays {
            return Err(Error::InvalidConfig(format!(
                "{} topology needs exactly {relays} relay uplink(s) and downlink(s)",
                kind.label()
            )));
        }
        link_sd.validate()?;
        for l in link_sr.iter().chain(&link_rd) {
            l.validate()?;
        }
        Ok(Topology { kind, link_sd, link_sr, link_rd })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn link_sd(&self) -> &LinkSpec {
        &self.link_sd
    }

    pub fn links_sr(&self) -> &[LinkSpec] {
        &self.link_sr
    }

    pub fn links_rd(&self) -> &[LinkSpec] {
        &self.link_rd
    }
}

/// Per-path received observations of one broadcast.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    pub y_sd: Vec<Complex64>,
    pub y_sr1: Option<Vec<Complex64>>,
    pub y_sr2: Option<Vec<Complex64>>,
}

/// Element-wise sum of the present observations.
pub fn combine_signals(signals: &SignalSet) -> Result<Vec<Complex64>> {
    let n = signals.y_sd.len();
    if n == 0 {
        return Err(Error::param("y_sd", "direct observation must be present"));
    }
    for path in [&signals.y_sr1, &signals.y_sr2].into_iter().flatten() {
        if path.len() != n {
            return Err(Error::LengthMismatch {
                context: "combined signal paths",
                expected: n,
                got: path.len(),
            });
        }
    }
    let mut combined = signals.y_sd.clone();
    for path in [&signals.y_sr1, &signals.y_sr2].into_iter().flatten() {
        for (c, s) in combined.iter_mut().zip(path) {
            *c += s;
        }
    }
    Ok(combined)
}

/// Packet error rate of one link from its symbol error rate, frame length
/// in bits, and bits per symbol: `1 - (1 - ser)^(L/b)`.
///
/// `L` must be a positive multiple of `b`; the exponent is an exact symbol
/// count, matching what the bit-level simulator transmits.
pub fn per_link(ser: f64, frame_bits: u64, bits_per_symbol: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&ser) {
        return Err(Error::param("ser", "must lie in [0, 1]"));
    }
    if frame_bits == 0 {
        return Err(Error::param("frame_bits", "must be > 0"));
    }
    if !frame_bits.is_multiple_of(u64::from(bits_per_symbol)) {
        return Err(Error::param(
            "frame_bits",
            format!("{frame_bits} is not a multiple of {bits_per_symbol} bits/symbol"),
        ));
    }
    let symbols = frame_bits / u64::from(bits_per_symbol);
    Ok(1.0 - (1.0 - ser).powi(symbols as i32))
}

/// Direct transmission delivers iff the single link does.
pub fn per_dt(per_sd: f64) -> f64 {
    per_sd
}

/// Single-relay composition:
/// `per_sd * per_sr + per_sd * (1 - per_sr) * per_rd`.
pub fn per_src(per_sd: f64, per_sr: f64, per_rd: f64) -> f64 {
    per_sd * per_sr + per_sd * (1.0 - per_sr) * per_rd
}

/// Dual-relay composition:
/// `per_sd * per_sr1 * per_sr2
///  + per_sd * (1 - per_sr1 * per_sr2) * per_r1d * per_r2d`.
///
/// The relay-phase condition is "at least one relay decoded"; with the
/// second relay pinned to certain failure this collapses to the
/// single-relay expression.
pub fn per_mrc(per_sd: f64, per_sr1: f64, per_sr2: f64, per_r1d: f64, per_r2d: f64) -> f64 {
    let both_uplinks_fail = per_sr1 * per_sr2;
    per_sd * both_uplinks_fail + per_sd * (1.0 - both_uplinks_fail) * per_r1d * per_r2d
}

/// How one link corrupts a coded frame during a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkModel {
    /// Block Rayleigh fading with this average SNR: one SNR draw per frame,
    /// complex Gaussian noise per symbol, hard decisions.
    Faded { sigma: f64 },
    /// Each bit flips independently with this probability.
    BitFlip(f64),
    /// Each symbol (bits/symbol-wide chunk) is replaced by a uniformly
    /// random different value with this probability.
    SymbolFlip(f64),
    /// With this probability the frame arrives corrupted (a 3-bit burst at
    /// the front, which every configured detector catches).
    FrameError(f64),
    /// Error-free transport.
    Perfect,
}

/// One path's reception: hard-decided bits plus raw symbol accounting.
#[derive(Debug, Clone)]
pub struct LinkReception {
    pub bits: Vec<u8>,
    pub symbol_errors: u64,
    pub symbols: u64,
}

/// Transports a coded frame over one link model. Frames whose bit count is
/// not a multiple of the bits/symbol are zero-padded on the air and
/// truncated after demapping.
pub fn transmit_over_link<R: Rng + ?Sized>(
    bits: &[u8],
    modulation: ModulationSpec,
    model: LinkModel,
    rng: &mut R,
) -> Result<LinkReception> {
    if bits.is_empty() {
        return Err(Error::param("bits", "must be non-empty"));
    }
    let b = modulation.bits_per_symbol() as usize;
    let symbols = bits.len().div_ceil(b) as u64;
    match model {
        LinkModel::Perfect => Ok(LinkReception { bits: bits.to_vec(), symbol_errors: 0, symbols }),
        LinkModel::Faded { sigma } => {
            let mut padded = bits.to_vec();
            padded.resize(symbols as usize * b, 0);
            let tx = map_symbols(&padded, modulation)?;
            let snr = sample_snr(sigma, rng)?;
            let rx = transmit_symbols(&tx, snr, rng)?;
            let decided = demap_symbols(&rx, modulation);
            let symbol_errors = count_symbol_errors(&padded, &decided, b);
            let mut out = decided;
            out.truncate(bits.len());
            Ok(LinkReception { bits: out, symbol_errors, symbols })
        }
        LinkModel::BitFlip(p) => {
            check_probability(p)?;
            let out: Vec<u8> = bits.iter().map(|&bit| bit ^ u8::from(rng.gen::<f64>() < p)).collect();
            let symbol_errors = count_symbol_errors(bits, &out, b);
            Ok(LinkReception { bits: out, symbol_errors, symbols })
        }
        LinkModel::SymbolFlip(p) => {
            check_probability(p)?;
            let mut out = bits.to_vec();
            let mut symbol_errors = 0u64;
            for chunk in out.chunks_mut(b) {
                if rng.gen::<f64>() < p {
                    symbol_errors += 1;
                    // Replace with a uniformly random different chunk value.
                    let width = chunk.len();
                    let current = chunk.iter().fold(0u32, |a, &x| (a << 1) | u32::from(x));
                    let mut replacement = rng.gen_range(0..(1u32 << width) - 1);
                    if replacement >= current {
                        replacement += 1;
                    }
                    for (i, slot) in chunk.iter_mut().enumerate() {
                        *slot = ((replacement >> (width - 1 - i)) & 1) as u8;
                    }
                }
            }
            Ok(LinkReception { bits: out, symbol_errors, symbols })
        }
        LinkModel::FrameError(p) => {
            check_probability(p)?;
            let mut out = bits.to_vec();
            let mut symbol_errors = 0;
            if rng.gen::<f64>() < p {
                for bit in out.iter_mut().take(3) {
                    *bit ^= 1;
                }
                symbol_errors = count_symbol_errors(bits, &out, b);
            }
            Ok(LinkReception { bits: out, symbol_errors, symbols })
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("probability", "must lie in [0, 1]"));
    }
    Ok(())
}

fn count_symbol_errors(sent: &[u8], received: &[u8], b: usize) -> u64 {
    sent.chunks(b)
        .zip(received.chunks(b))
        .filter(|(a, c)| a != c)
        .count() as u64
}

/// Link models for every path of a topology at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyModel {
    pub kind: TopologyKind,
    pub sd: LinkModel,
    pub sr: Vec<LinkModel>,
    pub rd: Vec<LinkModel>,
}

impl TopologyModel {
    /// Uniform model on every link; handy for injected-error sweeps.
    pub fn uniform(kind: TopologyKind, model: LinkModel) -> Self {
        let relays = kind.relays();
        TopologyModel {
            kind,
            sd: model,
            sr: vec![model; relays],
            rd: vec![model; relays],
        }
    }
}

/// The three event classes the relay phase can produce; the energy model
/// weights its per-packet costs by these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventClass {
    /// The destination decoded the broadcast directly.
    DirectSuccess,
    /// The destination missed it and no relay decoded it either.
    AllPathsFailed,
    /// The destination missed it, at least one relay decoded it, and the
    /// relay phase ran (every downlink carried the recovered frame).
    RelayForwarded,
}

impl EventClass {
    pub fn label(&self) -> &'static str {
        match self {
            EventClass::DirectSuccess => "direct",
            EventClass::AllPathsFailed => "failed",
            EventClass::RelayForwarded => "relayed",
        }
    }
}

/// Per-attempt decode surface a protocol exposes to the transport. Type-2
/// hybrid ARQ keeps combining state per receiver, hence `&mut self`.
pub trait FrameProcessor {
    /// Destination decode of the direct-path reception.
    fn decode_direct(&mut self, received: &[u8]) -> PathDecode;
    /// Relay-side decode of the broadcast.
    fn decode_relay(&mut self, relay: usize, received: &[u8]) -> PathDecode;
    /// Coded bits a relay transmits once the frame content is recovered
    /// (always a self-contained codeword).
    fn forwarded_bits(&self, content: &[u8]) -> Vec<u8>;
    /// Destination decode of a forwarded copy.
    fn decode_forwarded(&mut self, received: &[u8]) -> PathDecode;
}

/// One path's decode attempt: best-effort content plus whether every check
/// passed.
#[derive(Debug, Clone)]
pub struct PathDecode {
    pub content: Vec<u8>,
    pub accepted: bool,
}

/// Outcome of transporting one frame over a topology.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub event: EventClass,
    /// Content accepted by the destination, if any path got through.
    pub delivered: Option<Vec<u8>>,
    /// Best-effort content from the direct path (error measurement on
    /// failures keys off this).
    pub direct_best_effort: Vec<u8>,
    pub sd_symbol_errors: u64,
    pub sd_symbols: u64,
    pub sd_decoded: bool,
    /// Per-relay uplink decode outcomes (empty for DT).
    pub sr_decoded: Vec<bool>,
    /// Per-downlink decode outcomes; populated only when the relay phase ran.
    pub rd_decoded: Vec<bool>,
}

/// Broadcasts one coded frame and executes the relay event logic.
///
/// The source transmits; the destination and all relays attempt decode. If
/// the destination fails and at least one relay decoded, the recovered frame
/// goes out on every relay downlink and the destination takes the first
/// copy that decodes.
pub fn simulate_frame(
    model: &TopologyModel,
    frame_bits: &[u8],
    modulation: ModulationSpec,
    processor: &mut dyn FrameProcessor,
    streams: &TrialStreams,
    attempt: u32,
) -> Result<FrameOutcome> {
    let mut sd_rng = streams.stream(StreamTag::LinkSd, attempt);
    let sd_rx = transmit_over_link(frame_bits, modulation, model.sd, &mut sd_rng)?;
    let direct = processor.decode_direct(&sd_rx.bits);

    if direct.accepted {
        return Ok(FrameOutcome {
            event: EventClass::DirectSuccess,
            delivered: Some(direct.content.clone()),
            direct_best_effort: direct.content,
            sd_symbol_errors: sd_rx.symbol_errors,
            sd_symbols: sd_rx.symbols,
            sd_decoded: true,
            sr_decoded: Vec::new(),
            rd_decoded: Vec::new(),
        })
    }

    let mut sr_decoded = Vec::with_capacity(model.sr.len());
    let mut recovered: Option<Vec<u8>> = None;
    for (i, &sr_model) in model.sr.iter().enumerate() {
        let mut rng = streams.stream(StreamTag::LinkSr(i as u8), attempt);
        let rx = transmit_over_link(frame_bits, modulation, sr_model, &mut rng)?;
        let decode = processor.decode_relay(i, &rx.bits);
        sr_decoded.push(decode.accepted);
        if decode.accepted && recovered.is_none() {
            recovered = Some(decode.content);
        }
    }

    let Some(content) = recovered else {
        return Ok(FrameOutcome {
            event: EventClass::AllPathsFailed,
            delivered: None,
            direct_best_effort: direct.content,
            sd_symbol_errors: sd_rx.symbol_errors,
            sd_symbols: sd_rx.symbols,
            sd_decoded: false,
            sr_decoded,
            rd_decoded: Vec::new(),
        });
    };

    let forwarded = processor.forwarded_bits(&content);
    let mut rd_decoded = Vec::with_capacity(model.rd.len());
    let mut delivered: Option<Vec<u8>> = None;
    for (i, &rd_model) in model.rd.iter().enumerate() {
        let mut rng = streams.stream(StreamTag::LinkRd(i as u8), attempt);
        let rx = transmit_over_link(&forwarded, modulation, rd_model, &mut rng)?;
        let decode = processor.decode_forwarded(&rx.bits);
        rd_decoded.push(decode.accepted);
        if decode.accepted && delivered.is_none() {
            delivered = Some(decode.content);
        }
    }

    Ok(FrameOutcome {
        event: EventClass::RelayForwarded,
        delivered,
        direct_best_effort: direct.content,
        sd_symbol_errors: sd_rx.symbol_errors,
        sd_symbols: sd_rx.symbols,
        sd_decoded: false,
        sr_decoded,
        rd_decoded,
    })
}
