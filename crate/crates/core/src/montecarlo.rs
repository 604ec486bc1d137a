//! Experiment engine: seeded trial batches across parameter sweeps,
//! aggregated into BER/SER/PER/throughput/delay/energy metrics with
//! confidence intervals.
//!
//! Trials are embarrassingly parallel. Each trial's streams derive from
//! `(master_seed, point_index, trial_index)`, and aggregation folds fixed
//! 1024-trial chunks in index order, so results are bit-identical across
//! runs and worker counts. The sequential path is always available; the
//! `parallel` feature (default) adds a work-stealing path over the same
//! chunk structure.

use crate::channel::average_snr;
use crate::codecs::CodeSpec;
use crate::cooperation::{
    per_dt, per_link, per_mrc, per_src, LinkModel, Topology, TopologyKind, TopologyModel,
};
use crate::energy::{
    efficiency, energy_dt, energy_mrc, energy_src, EnergyParams, MrcEnergyModel,
};
use crate::error::Error;
use crate::error_control::{
    run_session, sw_arq_throughput_analytic, ProtocolConfig, ReceiverState, SessionParams,
    ACK_FRAME_BITS,
};
use crate::modem::{ser_mqam, ser_to_ber, ModulationSpec};
use crate::rng::{StreamTag, TrialStreams};
use crate::Result;
use rand::Rng;

/// Trials per aggregation chunk. Fixed so the floating-point fold order
/// never depends on the worker count.
const CHUNK: u64 = 1024;

/// What the sweep varies and over which points.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Average direct-link SNR in dB; relay links scale by their geometry.
    SnrDb(Vec<f64>),
    /// Injected independent bit error rate on every link.
    Ber(Vec<f64>),
    /// Direct-link distance in meters; all links scale proportionally.
    Distance(Vec<f64>),
    /// Error-correcting code per point.
    Code(Vec<CodeSpec>),
}

impl SweepSpec {
    pub fn len(&self) -> usize {
        match self {
            SweepSpec::SnrDb(v) | SweepSpec::Ber(v) | SweepSpec::Distance(v) => v.len(),
            SweepSpec::Code(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric sweep value (NaN for code sweeps, which are categorical).
    pub fn value(&self, idx: usize) -> f64 {
        match self {
            SweepSpec::SnrDb(v) | SweepSpec::Ber(v) | SweepSpec::Distance(v) => v[idx],
            SweepSpec::Code(_) => f64::NAN,
        }
    }

    pub fn label(&self, idx: usize) -> String {
        match self {
            SweepSpec::SnrDb(v) | SweepSpec::Ber(v) | SweepSpec::Distance(v) => {
                format!("{}", v[idx])
            }
            SweepSpec::Code(v) => v[idx].label(),
        }
    }

    /// Sweep column name for emitted tables; distinct from every metric
    /// column.
    pub fn variable_name(&self) -> &'static str {
        match self {
            SweepSpec::SnrDb(_) => "snr_db",
            SweepSpec::Ber(_) => "injected_ber",
            SweepSpec::Distance(_) => "distance_m",
            SweepSpec::Code(_) => "code",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::param("sweep_points", "must be non-empty"));
        }
        let numeric = match self {
            SweepSpec::SnrDb(v) | SweepSpec::Distance(v) | SweepSpec::Ber(v) => v,
            SweepSpec::Code(_) => return Ok(()),
        };
        if numeric.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("sweep_points", "must be strictly increasing"));
        }
        if let SweepSpec::Ber(v) = self {
            if v.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::param("sweep_points", "bit error rates must lie in [0, 1]"));
            }
        }
        if let SweepSpec::Distance(v) = self {
            if v.iter().any(|d| !(*d > 0.0)) {
                return Err(Error::param("sweep_points", "distances must be > 0"));
            }
        }
        Ok(())
    }
}

/// One experiment: topology, modulation, protocol, energy accounting, and
/// the sweep to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub topology: Topology,
    pub modulation: ModulationSpec,
    pub protocol: ProtocolConfig,
    pub energy: EnergyParams,
    pub sweep: SweepSpec,
    pub trials_per_point: u64,
    pub master_seed: u64,
    pub charge_ack_energy: bool,
    pub mrc_energy_model: MrcEnergyModel,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.sweep.validate()?;
        self.energy.validate()?;
        if self.trials_per_point == 0 {
            return Err(Error::param("trials_per_point", "must be >= 1"));
        }
        Ok(())
    }

    /// Protocol configuration in force at one sweep point.
    pub fn protocol_at(&self, idx: usize) -> ProtocolConfig {
        match &self.sweep {
            SweepSpec::Code(codes) => {
                ProtocolConfig { code: codes[idx].clone(), ..self.protocol.clone() }
            }
            _ => self.protocol.clone(),
        }
    }

    /// Energy accounting at one sweep point (frame length tracks the code).
    pub fn energy_at(&self, idx: usize) -> EnergyParams {
        let protocol = self.protocol_at(idx);
        EnergyParams {
            frame_bits: protocol.coded_frame_bits() as u64,
            payload_bits: protocol.payload_bits as u64,
            ..self.energy.clone()
        }
    }

    /// Per-link channel models at one sweep point.
    pub fn model_at(&self, idx: usize) -> Result<TopologyModel> {
        let topo = &self.topology;
        let faded = |links: &Topology| -> Result<TopologyModel> {
            Ok(TopologyModel {
                kind: links.kind(),
                sd: LinkModel::Faded { sigma: average_snr(links.link_sd())? },
                sr: links
                    .links_sr()
                    .iter()
                    .map(|l| average_snr(l).map(|s| LinkModel::Faded { sigma: s }))
                    .collect::<Result<_>>()?,
                rd: links
                    .links_rd()
                    .iter()
                    .map(|l| average_snr(l).map(|s| LinkModel::Faded { sigma: s }))
                    .collect::<Result<_>>()?,
            })
        };
        match &self.sweep {
            SweepSpec::SnrDb(points) => {
                let sigma_sd = 10f64.powf(points[idx] / 10.0);
                // Scale every node's transmit power so the direct link hits
                // the target; relay links follow from their own geometry.
                let sd = self.topology.link_sd();
                let power = sigma_sd * sd.noise_power_w * sd.distance_m.powf(sd.path_loss_exponent)
                    / sd.gain;
                let scaled = Topology::new(
                    topo.kind(),
                    sd.with_tx_power(power),
                    topo.links_sr().iter().map(|l| l.with_tx_power(power)).collect(),
                    topo.links_rd().iter().map(|l| l.with_tx_power(power)).collect(),
                )?;
                faded(&scaled)
            }
            SweepSpec::Ber(points) => {
                Ok(TopologyModel::uniform(topo.kind(), LinkModel::BitFlip(points[idx])))
            }
            SweepSpec::Distance(points) => {
                let factor = points[idx] / topo.link_sd().distance_m;
                let scaled = Topology::new(
                    topo.kind(),
                    topo.link_sd().scaled_distance(factor),
                    topo.links_sr().iter().map(|l| l.scaled_distance(factor)).collect(),
                    topo.links_rd().iter().map(|l| l.scaled_distance(factor)).collect(),
                )?;
                faded(&scaled)
            }
            SweepSpec::Code(_) => faded(topo),
        }
    }

    /// Round trip charged per attempt: the feedback frame's airtime.
    pub fn round_trip_s(&self) -> f64 {
        ACK_FRAME_BITS as f64 / self.energy.bit_rate_bps
    }
}

/// One experiment point's aggregated metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub sweep_label: String,
    pub sweep_value: f64,
    /// Post-protocol payload bit error rate, best-effort receiver output.
    pub ber: f64,
    pub ber_ci: f64,
    /// Raw direct-link symbol error rate, before any correction.
    pub ser: f64,
    pub ser_ci: f64,
    /// Residual symbol error rate after the full protocol; an undelivered
    /// frame counts all of its payload symbols as errored.
    pub residual_ser: f64,
    pub residual_ser_ci: f64,
    /// Residual frame failure rate (not delivered exactly).
    pub per: f64,
    pub per_ci: f64,
    pub throughput_bps: f64,
    pub throughput_ci: f64,
    pub mean_delay_s: f64,
    pub mean_delay_ci: f64,
    pub energy_per_packet_j: f64,
    pub energy_ci: f64,
    pub efficiency_bits_per_j: f64,
    pub trials: u64,
}

/// Per-link decode rates measured during a point run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinkRates {
    pub sd: (u64, u64),
    pub sr: [(u64, u64); 2],
    pub rd: [(u64, u64); 2],
}

impl LinkRates {
    pub fn rate(counts: (u64, u64)) -> f64 {
        if counts.1 == 0 {
            f64::NAN
        } else {
            counts.0 as f64 / counts.1 as f64
        }
    }
}

/// Metrics row plus the raw tallies consistency checks need.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDetail {
    pub row: MetricsRow,
    pub links: LinkRates,
    pub mean_attempts: f64,
    pub attempts_se: f64,
    /// Trials whose payload was not delivered exactly (includes accepted
    /// frames whose payload was wrong).
    pub e2e_failures: u64,
    /// Trials the receiver never accepted; this is the event the per-link
    /// composition laws describe.
    pub undelivered: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    trials: u64,
    failures: u64,
    delivered: u64,
    payload_bits: u64,
    payload_bit_errors: u64,
    sd_sym_errors: u64,
    sd_syms: u64,
    residual_sym_errors: u64,
    residual_syms: u64,
    attempts_sum: f64,
    attempts_sq: f64,
    delivered_bits_sum: f64,
    delivered_bits_sq: f64,
    elapsed_sum: f64,
    elapsed_sq: f64,
    bits_elapsed_cross: f64,
    delivered_elapsed_sum: f64,
    delivered_elapsed_sq: f64,
    energy_sum: f64,
    energy_sq: f64,
    sd_fail: u64,
    sd_att: u64,
    sr_fail: [u64; 2],
    sr_att: [u64; 2],
    rd_fail: [u64; 2],
    rd_att: [u64; 2],
}

impl Accum {
    fn merge(&mut self, other: &Accum) {
        self.trials += other.trials;
        self.failures += other.failures;
        self.delivered += other.delivered;
        self.payload_bits += other.payload_bits;
        self.payload_bit_errors += other.payload_bit_errors;
        self.sd_sym_errors += other.sd_sym_errors;
        self.sd_syms += other.sd_syms;
        self.residual_sym_errors += other.residual_sym_errors;
        self.residual_syms += other.residual_syms;
        self.attempts_sum += other.attempts_sum;
        self.attempts_sq += other.attempts_sq;
        self.delivered_bits_sum += other.delivered_bits_sum;
        self.delivered_bits_sq += other.delivered_bits_sq;
        self.elapsed_sum += other.elapsed_sum;
        self.elapsed_sq += other.elapsed_sq;
        self.bits_elapsed_cross += other.bits_elapsed_cross;
        self.delivered_elapsed_sum += other.delivered_elapsed_sum;
        self.delivered_elapsed_sq += other.delivered_elapsed_sq;
        self.energy_sum += other.energy_sum;
        self.energy_sq += other.energy_sq;
        self.sd_fail += other.sd_fail;
        self.sd_att += other.sd_att;
        for i in 0..2 {
            self.sr_fail[i] += other.sr_fail[i];
            self.sr_att[i] += other.sr_att[i];
            self.rd_fail[i] += other.rd_fail[i];
            self.rd_att[i] += other.rd_att[i];
        }
    }
}

struct PointContext {
    protocol: ProtocolConfig,
    energy: EnergyParams,
    model: TopologyModel,
    modulation: ModulationSpec,
    charge_ack: bool,
    round_trip_s: f64,
    master_seed: u64,
    point_index: u64,
}

fn run_chunk(ctx: &PointContext, start: u64, end: u64) -> Result<Accum> {
    let mut acc = Accum::default();
    let params = SessionParams {
        config: &ctx.protocol,
        model: &ctx.model,
        modulation: ctx.modulation,
        energy: &ctx.energy,
        charge_ack_energy: ctx.charge_ack,
        round_trip_s: ctx.round_trip_s,
    };
    let b = ctx.modulation.bits_per_symbol() as usize;
    for trial in start..end {
        let streams = TrialStreams::new(ctx.master_seed, ctx.point_index, trial);
        let mut payload_rng = streams.stream(StreamTag::Payload, 0);
        let payload: Vec<u8> = (0..ctx.protocol.payload_bits)
            .map(|_| payload_rng.gen::<bool>() as u8)
            .collect();
        let mut receiver = ReceiverState::new();
        let out = run_session(&params, &payload, 0, &mut receiver, &streams, None)?;

        acc.trials += 1;
        let exact = out.delivered_payload.as_deref() == Some(payload.as_slice());
        if !exact {
            acc.failures += 1;
        }
        if out.log.delivered {
            acc.delivered += 1;
        }
        acc.payload_bits += payload.len() as u64;
        acc.payload_bit_errors += payload
            .iter()
            .zip(&out.best_effort_payload)
            .filter(|(a, b)| a != b)
            .count() as u64;
        acc.sd_sym_errors += out.tallies.sd_symbol_errors;
        acc.sd_syms += out.tallies.sd_symbols;

        let payload_syms = payload.len().div_ceil(b) as u64;
        acc.residual_syms += payload_syms;
        if exact {
            // Delivered exactly: no residual symbol errors.
        } else if let Some(d) = &out.delivered_payload {
            acc.residual_sym_errors += payload
                .chunks(b)
                .zip(d.chunks(b))
                .filter(|(x, y)| x != y)
                .count() as u64;
        } else {
            acc.residual_sym_errors += payload_syms;
        }

        let attempts = f64::from(out.log.attempts);
        acc.attempts_sum += attempts;
        acc.attempts_sq += attempts * attempts;
        let x = if out.log.delivered { out.log.payload_bits as f64 } else { 0.0 };
        let y = out.log.elapsed_s;
        acc.delivered_bits_sum += x;
        acc.delivered_bits_sq += x * x;
        acc.elapsed_sum += y;
        acc.elapsed_sq += y * y;
        acc.bits_elapsed_cross += x * y;
        if out.log.delivered {
            acc.delivered_elapsed_sum += y;
            acc.delivered_elapsed_sq += y * y;
        }
        acc.energy_sum += out.log.energy_j;
        acc.energy_sq += out.log.energy_j * out.log.energy_j;

        acc.sd_fail += out.tallies.sd_failures;
        acc.sd_att += out.tallies.sd_attempts;
        for i in 0..2 {
            acc.sr_fail[i] += out.tallies.sr_failures[i];
            acc.sr_att[i] += out.tallies.sr_attempts[i];
            acc.rd_fail[i] += out.tallies.rd_failures[i];
            acc.rd_att[i] += out.tallies.rd_attempts[i];
        }
    }
    Ok(acc)
}

fn chunk_ranges(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .collect()
}

fn execute_point(scenario: &Scenario, idx: usize, parallel: bool) -> Result<Accum> {
    scenario.validate()?;
    if idx >= scenario.sweep.len() {
        return Err(Error::param("point_index", "outside the sweep"));
    }
    let ctx = PointContext {
        protocol: scenario.protocol_at(idx),
        energy: scenario.energy_at(idx),
        model: scenario.model_at(idx)?,
        modulation: scenario.modulation,
        charge_ack: scenario.charge_ack_energy,
        round_trip_s: scenario.round_trip_s(),
        master_seed: scenario.master_seed,
        point_index: idx as u64,
    };
    ctx.protocol.validate()?;
    let ranges = chunk_ranges(scenario.trials_per_point);
    let partials: Vec<Result<Accum>> = if parallel {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            ranges.par_iter().map(|&(s, e)| run_chunk(&ctx, s, e)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ranges.iter().map(|&(s, e)| run_chunk(&ctx, s, e)).collect()
        }
    } else {
        ranges.iter().map(|&(s, e)| run_chunk(&ctx, s, e)).collect()
    };
    let mut total = Accum::default();
    for p in partials {
        total.merge(&p?);
    }
    Ok(total)
}

/// Wilson-score 95% interval for a binomial rate. Returns the plain
/// estimate and the largest distance from it to an interval bound.
pub fn confidence_interval(successes: u64, trials: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    if successes > trials {
        return Err(Error::param("successes", "must not exceed trials"));
    }
    const Z: f64 = 1.959963984540054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = (center - half).max(0.0);
    let hi = (center + half).min(1.0);
    Ok((p, (p - lo).max(hi - p)))
}

fn rate_ci(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    confidence_interval(successes, trials).expect("counts validated")
}

fn mean_ci(sum: f64, sq: f64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mean = sum / nf;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = ((sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
    (mean, 1.959963984540054 * (var / nf).sqrt())
}

/// Ratio-of-sums estimate with a linearized standard error.
fn ratio_ci(sum_x: f64, sq_x: f64, sum_y: f64, sq_y: f64, cross: f64, n: u64) -> (f64, f64) {
    if n == 0 || sum_y == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let r = sum_x / sum_y;
    if n == 1 {
        return (r, f64::NAN);
    }
    let nf = n as f64;
    let mean_y = sum_y / nf;
    let ss = (sq_x - 2.0 * r * cross + r * r * sq_y
        - (sum_x - r * sum_y) * (sum_x - r * sum_y) / nf)
        .max(0.0);
    let se = (ss / (nf - 1.0)).sqrt() / (nf.sqrt() * mean_y);
    (r, 1.959963984540054 * se)
}

fn assemble(scenario: &Scenario, idx: usize, acc: &Accum) -> PointDetail {
    let (per, per_ci) = rate_ci(acc.failures, acc.trials);
    let (ber, ber_ci) = rate_ci(acc.payload_bit_errors, acc.payload_bits);
    let (ser, ser_ci) = rate_ci(acc.sd_sym_errors, acc.sd_syms);
    let (rser, rser_ci) = rate_ci(acc.residual_sym_errors, acc.residual_syms);
    let (throughput, throughput_ci) = ratio_ci(
        acc.delivered_bits_sum,
        acc.delivered_bits_sq,
        acc.elapsed_sum,
        acc.elapsed_sq,
        acc.bits_elapsed_cross,
        acc.trials,
    );
    let (delay, delay_ci) =
        mean_ci(acc.delivered_elapsed_sum, acc.delivered_elapsed_sq, acc.delivered);
    let (energy, energy_ci) = mean_ci(acc.energy_sum, acc.energy_sq, acc.trials);
    let eff = if acc.energy_sum > 0.0 {
        acc.delivered_bits_sum / acc.energy_sum
    } else {
        f64::NAN
    };
    let (mean_attempts, attempts_se) = mean_ci(acc.attempts_sum, acc.attempts_sq, acc.trials);
    let row = MetricsRow {
        sweep_label: scenario.sweep.label(idx),
        sweep_value: scenario.sweep.value(idx),
        ber,
        ber_ci,
        ser,
        ser_ci,
        residual_ser: rser,
        residual_ser_ci: rser_ci,
        per,
        per_ci,
        throughput_bps: throughput,
        throughput_ci,
        mean_delay_s: delay,
        mean_delay_ci: delay_ci,
        energy_per_packet_j: energy,
        energy_ci,
        efficiency_bits_per_j: eff,
        trials: acc.trials,
    };
    PointDetail {
        row,
        links: LinkRates {
            sd: (acc.sd_fail, acc.sd_att),
            sr: [(acc.sr_fail[0], acc.sr_att[0]), (acc.sr_fail[1], acc.sr_att[1])],
            rd: [(acc.rd_fail[0], acc.rd_att[0]), (acc.rd_fail[1], acc.rd_att[1])],
        },
        mean_attempts,
        attempts_se: attempts_se / 1.959963984540054,
        e2e_failures: acc.failures,
        undelivered: acc.trials - acc.delivered,
    }
}

/// Runs one sweep point. Uses the parallel path when the `parallel` feature
/// is enabled; results are identical either way.
pub fn run_point(scenario: &Scenario, idx: usize) -> Result<MetricsRow> {
    Ok(run_point_detailed(scenario, idx)?.row)
}

/// [`run_point`] plus link tallies for consistency checks.
pub fn run_point_detailed(scenario: &Scenario, idx: usize) -> Result<PointDetail> {
    let acc = execute_point(scenario, idx, cfg!(feature = "parallel"))?;
    Ok(assemble(scenario, idx, &acc))
}

/// Single-threaded execution of one point, regardless of features.
pub fn run_point_sequential(scenario: &Scenario, idx: usize) -> Result<MetricsRow> {
    let acc = execute_point(scenario, idx, false)?;
    Ok(assemble(scenario, idx, &acc).row)
}

/// Work-stealing execution of one point.
#[cfg(feature = "parallel")]
pub fn run_point_parallel(scenario: &Scenario, idx: usize) -> Result<MetricsRow> {
    let acc = execute_point(scenario, idx, true)?;
    Ok(assemble(scenario, idx, &acc).row)
}

/// Runs every sweep point in order.
pub fn run_sweep(scenario: &Scenario) -> Result<Vec<MetricsRow>> {
    (0..scenario.sweep.len()).map(|i| run_point(scenario, i)).collect()
}

/// Closed-form counterpart of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPoint {
    pub sweep_label: String,
    pub sweep_value: f64,
    /// Average direct-link SNR (NaN for injected-error sweeps).
    pub sigma_sd: f64,
    /// Closed-form direct-link symbol error rate.
    pub ser_sd: f64,
    /// Gray-mapping bit error rate approximation of `ser_sd`.
    pub ber_sd: f64,
    /// Composed frame error rate for this topology.
    pub per: f64,
    /// Expected per-packet energy for this topology.
    pub energy_per_packet_j: f64,
    /// Delivered bits per joule.
    pub efficiency_bits_per_j: f64,
    /// Expected stop-and-wait throughput at the composed frame error rate.
    pub throughput_bps: f64,
}

/// Evaluates the closed-form model at one sweep point: link SNR to symbol
/// error rate to per-link and composed frame error rates, then energy,
/// efficiency and expected throughput.
pub fn analytic_point(scenario: &Scenario, idx: usize) -> Result<AnalyticPoint> {
    scenario.validate()?;
    if idx >= scenario.sweep.len() {
        return Err(Error::param("point_index", "outside the sweep"));
    }
    let protocol = scenario.protocol_at(idx);
    let energy_params = scenario.energy_at(idx);
    let model = scenario.model_at(idx)?;
    let b = scenario.modulation.bits_per_symbol();
    // The simulator zero-pads frames to a whole symbol count; the analytic
    // frame length matches.
    let frame_bits = (protocol.coded_frame_bits() as u64).div_ceil(u64::from(b)) * u64::from(b);

    let link_ser = |m: &LinkModel| -> Result<f64> {
        match m {
            LinkModel::Faded { sigma } => ser_mqam(*sigma, scenario.modulation),
            LinkModel::BitFlip(p) => Ok(1.0 - (1.0 - p).powi(b as i32)),
            LinkModel::SymbolFlip(p) => Ok(*p),
            LinkModel::FrameError(_) | LinkModel::Perfect => Ok(0.0),
        }
    };
    let link_per = |m: &LinkModel| -> Result<f64> {
        per_link(link_ser(m)?, frame_bits, b)
    };

    let per_sd = link_per(&model.sd)?;
    let per = match model.kind {
        TopologyKind::Dt => per_dt(per_sd),
        TopologyKind::Src => per_src(per_sd, link_per(&model.sr[0])?, link_per(&model.rd[0])?),
        TopologyKind::Mrc => per_mrc(
            per_sd,
            link_per(&model.sr[0])?,
            link_per(&model.sr[1])?,
            link_per(&model.rd[0])?,
            link_per(&model.rd[1])?,
        ),
    };
    let energy_j = match model.kind {
        TopologyKind::Dt => energy_dt(&energy_params)?,
        TopologyKind::Src => {
            energy_src(&energy_params, per_sd, link_per(&model.sr[0])?)?
        }
        TopologyKind::Mrc => energy_mrc(
            &energy_params,
            per_sd,
            link_per(&model.sr[0])?,
            link_per(&model.sr[1])?,
            scenario.mrc_energy_model,
        )?,
    };
    let eta = efficiency(protocol.payload_bits as u64, per, energy_j)?;
    let tx_time = energy_params.tx_time_s(frame_bits);
    let overhead = frame_bits - protocol.payload_bits as u64;
    let throughput = sw_arq_throughput_analytic(
        per,
        protocol.payload_bits as u64,
        overhead,
        scenario.round_trip_s(),
        tx_time,
    )?;
    let sigma_sd = match model.sd {
        LinkModel::Faded { sigma } => sigma,
        _ => f64::NAN,
    };
    let ser_sd = link_ser(&model.sd)?;
    Ok(AnalyticPoint {
        sweep_label: scenario.sweep.label(idx),
        sweep_value: scenario.sweep.value(idx),
        sigma_sd,
        ser_sd,
        ber_sd: ser_to_ber(ser_sd, scenario.modulation),
        per,
        energy_per_packet_j: energy_j,
        efficiency_bits_per_j: eta,
        throughput_bps: throughput,
    })
}

/// Closed-form rows for the whole sweep.
pub fn analytic_sweep(scenario: &Scenario) -> Result<Vec<AnalyticPoint>> {
    (0..scenario.sweep.len()).map(|i| analytic_point(scenario, i)).collect()
}
