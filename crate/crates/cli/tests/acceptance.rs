//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them). Tolerances are
//! pinned in code; nothing is deferred to later calibration.
//!
//! Known red: criterion 3a asserts the closed-form symbol error rate tracks
//! a faithful simulator within 10% down to an average SNR of 3. The closed
//! form is a union-bound average whose true gap is 11.2% at sigma 3 and
//! 10.3% at sigma 6 (exact values from the Gaussian-tail integrals), so the
//! assertion fails there by construction. The measurement is reported and
//! asserted at the pinned tolerance rather than loosened.

use cooplink::channel::{sample_snr, transmit_symbols, LinkSpec};
use cooplink::codecs::{
    crc4_append, crc4_check, hamming74_decode, hamming74_encode, CodeSpec, ReedSolomon,
};
use cooplink::cooperation::{
    per_link, per_mrc, per_src, LinkModel, Topology, TopologyKind, TopologyModel,
};
use cooplink::energy::{
    efficiency, energy_src, power_mrc, power_src, tx_energy_saving, uncoded_tx_power,
    EccLinkBudget, EnergyParams, MrcEnergyModel,
};
use cooplink::error_control::{
    run_session, run_stream, summarize, sw_arq_throughput_analytic, AckErrorModel, FaultAction,
    FaultPlan, ProtocolConfig, ReceiverState, SessionParams, Strategy,
};
use cooplink::modem::{demap_symbols, map_symbols, ser_mqam, ModulationSpec};
use cooplink::montecarlo::{
    analytic_sweep, confidence_interval, run_point_detailed, run_sweep, Scenario, SweepSpec,
};
use cooplink::rng::{StreamTag, TrialStreams};
use cooplink_cli::commands::{figure_family, render_run, with_workers};
use cooplink_cli::config::parse_config;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
}

fn energy_params(frame_bits: u64, payload_bits: u64) -> EnergyParams {
    EnergyParams {
        tx_power_w: 1e-3,
        amplifier_loss: 0.5,
        tx_circuit_w: 0.1,
        rx_circuit_w: 0.1,
        frame_bits,
        payload_bits,
        bit_rate_bps: 1e6,
        symbol_rate_baud: 5e5,
    }
}

/// Criterion 1: codec exhaustive oracles in under ten seconds.
#[test]
fn criterion_1_codec_exhaustive_oracles() {
    let start = Instant::now();

    // Hamming(7,4): all 16 x 7 single-bit corruptions corrected.
    for v in 0..16u32 {
        let m: Vec<u8> = (0..4).map(|i| ((v >> (3 - i)) & 1) as u8).collect();
        let code = hamming74_encode(&m).unwrap();
        for pos in 0..7 {
            let mut bad = code;
            bad[pos] ^= 1;
            let (decoded, _) = hamming74_decode(&bad).unwrap();
            assert_eq!(decoded[..], m[..], "hamming miss at message {v} position {pos}");
        }
    }

    // CRC-4: every single-bit flip and every burst of length <= 4 on every
    // payload of length <= 16 is detected.
    let burst_patterns: [&[u8]; 8] = [
        &[1],
        &[1, 1],
        &[1, 0, 1],
        &[1, 1, 1],
        &[1, 0, 0, 1],
        &[1, 0, 1, 1],
        &[1, 1, 0, 1],
        &[1, 1, 1, 1],
    ];
    for len in 1..=16usize {
        for value in 0u32..(1 << len) {
            let payload: Vec<u8> =
                (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
            let frame = crc4_append(&payload).unwrap();
            for pos in 0..frame.len() {
                let mut bad = frame.clone();
                bad[pos] ^= 1;
                assert!(
                    !crc4_check(&bad).unwrap(),
                    "crc missed single flip len {len} value {value:#x} pos {pos}"
                );
            }
            for pattern in burst_patterns {
                for startpos in 0..=(frame.len() - pattern.len()) {
                    let mut bad = frame.clone();
                    let mut changed = false;
                    for (k, &p) in pattern.iter().enumerate() {
                        bad[startpos + k] ^= p;
                        changed |= p == 1;
                    }
                    assert!(changed);
                    assert!(
                        !crc4_check(&bad).unwrap(),
                        "crc missed burst len {len} value {value:#x} start {startpos}"
                    );
                }
            }
        }
    }

    // RS(7,3): every error pattern of weight <= 2 over 200 random messages.
    let rs = ReedSolomon::new(3, 7, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for _ in 0..200 {
        let msg: Vec<u16> = (0..3).map(|_| rng.gen_range(0..8)).collect();
        let cw = rs.encode(&msg).unwrap();
        for pos in 0..7 {
            for mag in 1u16..8 {
                let mut rx = cw.clone();
                rx[pos] ^= mag;
                let (decoded, status) = rs.decode(&rx).unwrap();
                assert!(status.is_ok() && decoded == msg, "rs weight-1 miss at {pos}/{mag}");
            }
        }
        for p1 in 0..7 {
            for p2 in (p1 + 1)..7 {
                for m1 in 1u16..8 {
                    for m2 in 1u16..8 {
                        let mut rx = cw.clone();
                        rx[p1] ^= m1;
                        rx[p2] ^= m2;
                        let (decoded, status) = rs.decode(&rx).unwrap();
                        assert!(
                            status.is_ok() && decoded == msg,
                            "rs weight-2 miss at {p1},{p2} mags {m1},{m2}"
                        );
                    }
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = elapsed < 10.0;
    report(
        "criterion 1 (codec exhaustive oracles)",
        pass,
        &format!("hamming 112/112, crc single+burst exhaustive to len 16, rs(7,3) full radius x200; {elapsed:.1} s"),
    );
    assert!(pass, "codec oracles exceeded the 10 s budget: {elapsed:.1} s");
}

/// Criterion 2: closed-form spot checks at machine precision.
#[test]
fn criterion_2_analytic_spot_checks() {
    let qpsk = ModulationSpec::from_bits_per_symbol(2).unwrap();
    let ser = ser_mqam(6.0, qpsk).unwrap();
    assert!((ser - 0.133975).abs() <= 1e-6, "ser(6, qpsk) = {ser}");

    let pl = per_link(0.5, 8, 2).unwrap();
    assert_eq!(pl, 0.9375, "per_link hand value");

    let ps = per_src(0.5, 0.2, 0.3);
    assert!((ps - 0.22).abs() < 1e-15, "per_src hand value {ps}");

    let pm = per_mrc(0.5, 0.2, 0.2, 0.3, 0.3);
    assert!((pm - 0.0632).abs() < 1e-15, "per_mrc hand value {pm}");

    // Relay-phase case weights are a partition of unity over the 0.1 grid.
    let params = energy_params(1000, 1000);
    let grid: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
    for &sd in &grid {
        for &s1 in &grid {
            for &s2 in &grid {
                let total: f64 =
                    power_mrc(&params, sd, s1, s2).unwrap().iter().map(|c| c.weight).sum();
                assert!((total - 1.0).abs() < 1e-12, "weights {total} at {sd},{s1},{s2}");
            }
        }
    }

    report(
        "criterion 2 (analytic spot checks)",
        true,
        "ser(6)=0.133975, per_link=0.9375, per_src=0.22, per_mrc=0.0632, relay-phase weights sum to 1",
    );
}

/// Criterion 3a: Monte Carlo symbol error rate over Rayleigh fading versus
/// the closed form, 10% relative, for average SNR in [3, 100].
///
/// The closed form drops the squared tail term, so its true gap exceeds 10%
/// below an average SNR of about 8 (11.2% at 3, 10.3% at 6). Asserted as
/// stated; expected to fail at the low end.
#[test]
fn criterion_3a_ser_tracks_closed_form_within_ten_percent() {
    let qpsk = ModulationSpec::from_bits_per_symbol(2).unwrap();
    let start = Instant::now();
    let n_sym = 4_000_000usize;
    let mut gaps = Vec::new();
    for (point, &sigma) in [3.0f64, 6.0, 10.0, 30.0, 100.0].iter().enumerate() {
        let streams = TrialStreams::new(0x3A, point as u64, 0);
        let mut link = streams.stream(StreamTag::LinkSd, 0);
        let mut payload = streams.stream(StreamTag::Payload, 0);
        let mut errors = 0u64;
        let chunk = 1000usize;
        for _ in 0..n_sym / chunk {
            let bits: Vec<u8> = (0..2 * chunk).map(|_| payload.gen::<bool>() as u8).collect();
            let tx = map_symbols(&bits, qpsk).unwrap();
            let rx: Vec<_> = tx
                .iter()
                .map(|s| {
                    let snr = sample_snr(sigma, &mut link).unwrap();
                    transmit_symbols(std::slice::from_ref(s), snr, &mut link).unwrap()[0]
                })
                .collect();
            let decided = demap_symbols(&rx, qpsk);
            for i in 0..chunk {
                if bits[2 * i..2 * i + 2] != decided[2 * i..2 * i + 2] {
                    errors += 1;
                }
            }
        }
        let measured = errors as f64 / n_sym as f64;
        let formula = ser_mqam(sigma, qpsk).unwrap();
        let gap = (formula - measured).abs() / formula;
        gaps.push((sigma, measured, formula, gap));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = gaps.iter().all(|&(_, _, _, g)| g <= 0.10) && elapsed < 60.0;
    let detail: Vec<String> = gaps
        .iter()
        .map(|&(s, m, f, g)| format!("sigma {s}: sim {m:.6}, formula {f:.6}, gap {:.2}%", g * 100.0))
        .collect();
    report(
        "criterion 3a (simulated SER vs closed form, 10%)",
        pass,
        &format!("{} ({elapsed:.1} s)", detail.join("; ")),
    );
    for &(sigma, measured, formula, gap) in &gaps {
        assert!(
            gap <= 0.10,
            "sigma {sigma}: simulated {measured} vs closed form {formula}: relative gap {:.2}% exceeds 10% \
             (the closed form is an upper-bound average; its exact gap is 11.2% at sigma 3 and \
             10.3% at sigma 6, crossing 10% near sigma 8)",
            gap * 100.0
        );
    }
    assert!(elapsed < 60.0, "SER sweep exceeded 60 s: {elapsed:.1}");
}

fn faded_fec_scenario(kind: TopologyKind, snr_db: f64, trials: u64) -> Scenario {
    let sd = LinkSpec::new(100.0, 2.0, 1e-3, 1e-10).unwrap();
    let r1 = LinkSpec::new(62.0, 2.0, 1e-3, 1e-10).unwrap();
    let r2 = LinkSpec::new(70.0, 2.0, 1e-3, 1e-10).unwrap();
    let topology = match kind {
        TopologyKind::Dt => Topology::direct(sd).unwrap(),
        TopologyKind::Src => Topology::single_relay(sd, r1, r1).unwrap(),
        TopologyKind::Mrc => Topology::dual_relay(sd, [r1, r2], [r1, r2]).unwrap(),
    };
    let protocol = ProtocolConfig {
        strategy: Strategy::FecOnly,
        code: CodeSpec::reed_solomon(5, 31, 21).unwrap(),
        detector: CodeSpec::none(),
        max_retransmissions: 0,
        timeout_s: None,
        ack_error_model: AckErrorModel::Ideal,
        payload_bits: 88,
    };
    Scenario {
        energy: energy_params(protocol.coded_frame_bits() as u64, 88),
        topology,
        modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
        protocol,
        sweep: SweepSpec::SnrDb(vec![snr_db]),
        trials_per_point: trials,
        master_seed: 0x3B,
        charge_ack_energy: false,
        mrc_energy_model: MrcEnergyModel::Native,
    }
}

/// Criterion 3b: measured end-to-end frame failure for one and two relays
/// lies within the 95% interval of the composed expressions evaluated at
/// link rates measured in the same run (1e5 frames).
#[test]
fn criterion_3b_cooperative_failure_matches_composition() {
    let mut details = Vec::new();
    let mut all_pass = true;
    for kind in [TopologyKind::Src, TopologyKind::Mrc] {
        let scenario = faded_fec_scenario(kind, 9.0, 100_000);
        let detail = run_point_detailed(&scenario, 0).unwrap();
        let trials = detail.row.trials;
        let rate_and_ci = |counts: (u64, u64)| -> (f64, f64) {
            confidence_interval(counts.0, counts.1).unwrap()
        };
        let (sd, sd_h) = rate_and_ci(detail.links.sd);
        let (composed_lo, composed, composed_hi) = match kind {
            TopologyKind::Src => {
                let (sr, sr_h) = rate_and_ci(detail.links.sr[0]);
                let (rd, rd_h) = rate_and_ci(detail.links.rd[0]);
                (
                    per_src(
                        (sd - sd_h).max(0.0),
                        (sr - sr_h).max(0.0),
                        (rd - rd_h).max(0.0),
                    ),
                    per_src(sd, sr, rd),
                    per_src(
                        (sd + sd_h).min(1.0),
                        (sr + sr_h).min(1.0),
                        (rd + rd_h).min(1.0),
                    ),
                )
            }
            TopologyKind::Mrc => {
                let (s1, s1_h) = rate_and_ci(detail.links.sr[0]);
                let (s2, s2_h) = rate_and_ci(detail.links.sr[1]);
                let (r1, r1_h) = rate_and_ci(detail.links.rd[0]);
                let (r2, r2_h) = rate_and_ci(detail.links.rd[1]);
                (
                    per_mrc(
                        (sd - sd_h).max(0.0),
                        (s1 - s1_h).max(0.0),
                        (s2 - s2_h).max(0.0),
                        (r1 - r1_h).max(0.0),
                        (r2 - r2_h).max(0.0),
                    ),
                    per_mrc(sd, s1, s2, r1, r2),
                    per_mrc(
                        (sd + sd_h).min(1.0),
                        (s1 + s1_h).min(1.0),
                        (s2 + s2_h).min(1.0),
                        (r1 + r1_h).min(1.0),
                        (r2 + r2_h).min(1.0),
                    ),
                )
            }
            TopologyKind::Dt => unreachable!(),
        };
        // Frame failure here is non-delivery: that is the event the
        // composition laws describe. (Accepted-but-wrong frames are a
        // separate, far rarer outcome tracked by `e2e_failures`.)
        let (measured, measured_h) = confidence_interval(detail.undelivered, trials).unwrap();
        let pass = measured + measured_h >= composed_lo && measured - measured_h <= composed_hi;
        all_pass &= pass;
        details.push(format!(
            "{}: measured {measured:.5}±{measured_h:.5}, composed {composed:.5} in [{composed_lo:.5}, {composed_hi:.5}]",
            kind.label()
        ));
    }
    report(
        "criterion 3b (end-to-end failure vs composed link rates)",
        all_pass,
        &details.join("; "),
    );
    assert!(all_pass, "{}", details.join("; "));
}

/// Criterion 4: protocol oracles: geometric attempts, analytic throughput,
/// exactly-once delivery under randomized faults.
#[test]
fn criterion_4_protocol_oracles() {
    let protocol = ProtocolConfig {
        strategy: Strategy::SwArq,
        code: CodeSpec::none(),
        detector: CodeSpec::crc4(),
        max_retransmissions: 63,
        timeout_s: None,
        ack_error_model: AckErrorModel::Ideal,
        payload_bits: 88,
    };
    let energy = energy_params(protocol.coded_frame_bits() as u64, 88);
    let frame_bits = protocol.coded_frame_bits() as u64;
    let rtt = 16e-6;
    let mut details = Vec::new();

    for (pi, &p) in [0.1f64, 0.3, 0.5].iter().enumerate() {
        let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::FrameError(p));
        let params = SessionParams {
            config: &protocol,
            model: &model,
            modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
            energy: &energy,
            charge_ack_energy: false,
            round_trip_s: rtt,
        };
        let trials = 100_000u64;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut logs = Vec::with_capacity(trials as usize);
        for trial in 0..trials {
            let streams = TrialStreams::new(0x40 + pi as u64, 0, trial);
            let mut rng = streams.stream(StreamTag::Payload, 0);
            let payload: Vec<u8> = (0..88).map(|_| rng.gen::<bool>() as u8).collect();
            let mut rx = ReceiverState::new();
            let out = run_session(&params, &payload, 0, &mut rx, &streams, None).unwrap();
            let a = f64::from(out.log.attempts);
            sum += a;
            sq += a * a;
            logs.push(out.log);
        }
        let n = trials as f64;
        let mean = sum / n;
        let var = (sq - sum * sum / n) / (n - 1.0);
        let se = (var / n).sqrt();
        let expected = 1.0 / (1.0 - p);
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "p={p}: mean attempts {mean} vs {expected} (3 s.e. = {})",
            3.0 * se
        );

        let summary = summarize(logs.iter()).unwrap();
        let tx_time = frame_bits as f64 / energy.bit_rate_bps;
        let analytic = sw_arq_throughput_analytic(p, 88, frame_bits - 88, rtt, tx_time).unwrap();
        let rel = (summary.throughput_bps - analytic).abs() / analytic;
        assert!(
            rel <= 0.03,
            "p={p}: throughput {} vs analytic {analytic} ({:.2}% off)",
            summary.throughput_bps,
            rel * 100.0
        );
        details.push(format!(
            "p={p}: attempts {mean:.3} (expect {expected:.3}), throughput within {:.2}%",
            rel * 100.0
        ));
    }

    // Exactly-once delivery across 10^4 randomized fault cases.
    let model = TopologyModel::uniform(TopologyKind::Dt, LinkModel::Perfect);
    let params = SessionParams {
        config: &protocol,
        model: &model,
        modulation: ModulationSpec::from_bits_per_symbol(2).unwrap(),
        energy: &energy,
        charge_ack_energy: false,
        round_trip_s: rtt,
    };
    let mut fault_rng = ChaCha8Rng::seed_from_u64(0x4FA);
    let streams_count = 2_000usize;
    let frames_per_stream = 5usize;
    let mut cases = 0usize;
    for stream_idx in 0..streams_count {
        let action = |rng: &mut ChaCha8Rng| match rng.gen_range(0..10) {
            0 => FaultAction::Drop,
            1 => FaultAction::Corrupt,
            _ => FaultAction::Pass,
        };
        let plan = FaultPlan {
            data: (0..64).map(|_| action(&mut fault_rng)).collect(),
            ack: (0..64).map(|_| action(&mut fault_rng)).collect(),
        };
        let payloads: Vec<Vec<u8>> = (0..frames_per_stream)
            .map(|i| {
                let mut rng = TrialStreams::new(0x50, stream_idx as u64, i as u64)
                    .stream(StreamTag::Payload, 1);
                (0..88).map(|_| rng.gen::<bool>() as u8).collect()
            })
            .collect();
        let mut rx = ReceiverState::new();
        let outcomes =
            run_stream(&params, &payloads, 0x60 + stream_idx as u64, &mut rx, Some(&plan))
                .unwrap();
        cases += outcomes.len();
        assert!(
            outcomes.iter().all(|o| o.log.delivered && !o.log.duplicate_delivered),
            "stream {stream_idx}: delivery or duplication failure"
        );
        assert_eq!(
            rx.accepted, payloads,
            "stream {stream_idx}: accepted sequence reordered, duplicated or lost"
        );
    }
    details.push(format!("exactly-once held over {cases} fault-injected frames"));

    report("criterion 4 (protocol oracles)", true, &details.join("; "));
    assert!(cases >= 10_000);
}

/// Criterion 5a: coded/cooperative BER ordering at every SNR point >= 10 dB
/// of the default sweep.
#[test]
fn criterion_5a_fig5_ordering() {
    let start = Instant::now();
    let family = figure_family("fig5", None, 1).unwrap();
    let rows: Vec<Vec<_>> =
        family.curves.iter().map(|c| run_sweep(&c.scenario).unwrap()).collect();
    let (uncoded, rs_dt, rs_src, rs_mrc) = (&rows[0], &rows[1], &rows[2], &rows[3]);
    let mut pass = true;
    let mut worst = String::new();
    for i in 0..uncoded.len() {
        let snr = uncoded[i].sweep_value;
        if snr < 10.0 {
            continue;
        }
        let chain = [uncoded[i].ber, rs_dt[i].ber, rs_src[i].ber, rs_mrc[i].ber];
        let ok = chain[0] > chain[1] && chain[1] > chain[2] && chain[2] > chain[3];
        if !ok {
            pass = false;
            worst = format!("violated at {snr} dB: {chain:?}");
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 5a (coded/cooperative BER ordering)",
        pass && elapsed < 300.0,
        &format!(
            "uncoded > coded > single-relay > dual-relay at all points >= 10 dB ({elapsed:.0} s). {worst}"
        ),
    );
    assert!(pass, "{worst}");
    assert!(elapsed < 300.0, "fig5 run exceeded 5 min: {elapsed:.0} s");
}

/// Criterion 5b: stop-and-wait throughput ordering at injected bit error
/// rates of 1e-2 and above, and the theoretical column passthrough.
#[test]
fn criterion_5b_fig6_ordering_and_theoretical_passthrough() {
    let start = Instant::now();
    let family = figure_family("fig6", None, 1).unwrap();
    let rows: Vec<Vec<_>> =
        family.curves.iter().map(|c| run_sweep(&c.scenario).unwrap()).collect();
    let (dt, src, mrc) = (&rows[0], &rows[1], &rows[2]);
    let mut pass = true;
    let mut worst = String::new();
    for i in 0..dt.len() {
        let ber = dt[i].sweep_value;
        if ber < 1e-2 {
            continue;
        }
        let ok = mrc[i].throughput_bps >= src[i].throughput_bps
            && src[i].throughput_bps >= dt[i].throughput_bps;
        if !ok {
            pass = false;
            worst = format!(
                "violated at injected ber {ber}: dt {} src {} mrc {}",
                dt[i].throughput_bps, src[i].throughput_bps, mrc[i].throughput_bps
            );
        }
    }

    // The theoretical curve is the closed-form expression, exactly.
    let dt_scenario = &family.curves[0].scenario;
    let analytic = analytic_sweep(dt_scenario).unwrap();
    let frame_bits = dt_scenario.protocol.coded_frame_bits() as u64;
    let padded = frame_bits.div_ceil(2) * 2;
    let tx_time = padded as f64 / dt_scenario.energy.bit_rate_bps;
    for a in &analytic {
        let expect = sw_arq_throughput_analytic(
            a.per,
            88,
            padded - 88,
            dt_scenario.round_trip_s(),
            tx_time,
        )
        .unwrap();
        assert_eq!(a.throughput_bps, expect, "theoretical passthrough differs");
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 5b (throughput ordering + theoretical passthrough)",
        pass && elapsed < 300.0,
        &format!("dual >= single >= direct at ber >= 1e-2; closed-form column exact ({elapsed:.0} s). {worst}"),
    );
    assert!(pass, "{worst}");
    assert!(elapsed < 300.0, "fig6 run exceeded 5 min: {elapsed:.0} s");
}

/// Criterion 5c: hybrid-ARQ residual symbol error rate with two relays
/// never exceeds the single-relay value at any common SNR point.
#[test]
fn criterion_5c_harq_relay_ser_ordering() {
    let start = Instant::now();
    let fig8 = figure_family("fig8", None, 1).unwrap();
    let fig9 = figure_family("fig9", None, 1).unwrap();
    let src = run_sweep(&fig8.curves[1].scenario).unwrap();
    let mrc = run_sweep(&fig9.curves[1].scenario).unwrap();
    let mut pass = true;
    let mut worst = String::new();
    for (s, m) in src.iter().zip(&mrc) {
        assert_eq!(s.sweep_value, m.sweep_value);
        if m.residual_ser > s.residual_ser {
            pass = false;
            worst = format!(
                "violated at {} dB: single {} dual {}",
                s.sweep_value, s.residual_ser, m.residual_ser
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 5c (hybrid-ARQ relay SER ordering)",
        pass && elapsed < 300.0,
        &format!("dual-relay residual SER <= single-relay at every common SNR ({elapsed:.0} s). {worst}"),
    );
    assert!(pass, "{worst}");
    assert!(elapsed < 300.0, "fig8/9 runs exceeded 5 min: {elapsed:.0} s");
}

/// Criterion 6: energy-model identities.
#[test]
fn criterion_6_energy_identities() {
    let params = energy_params(1000, 1000);
    let t = params.frame_bits as f64 / params.bit_rate_bps;
    let grid: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
    for &sd in &grid {
        for &sr in &grid {
            let e = energy_src(&params, sd, sr).unwrap();
            let from_cases: f64 = power_src(&params, sd, sr)
                .unwrap()
                .iter()
                .map(|c| c.weight * c.power_w * t)
                .sum();
            assert!(
                (e - from_cases).abs() <= 1e-15 * e.max(1e-30),
                "energy/power identity broke at {sd},{sr}: {e} vs {from_cases}"
            );
        }
    }

    let mut budget = EccLinkBudget { boltzmann: 1.38e-23, ..EccLinkBudget::default() };
    budget.ecc_gain_db = 0.0;
    assert_eq!(tx_energy_saving(&budget).unwrap(), 0.0);
    let eb_u = uncoded_tx_power(&budget).unwrap() / budget.bit_rate_bps;
    budget.ecc_gain_db = 400.0;
    let saving = tx_energy_saving(&budget).unwrap();
    assert!((saving - eb_u).abs() <= 1e-12 * eb_u, "saving {saving} vs {eb_u}");

    assert_eq!(efficiency(1000, 1.0, 1e-3).unwrap(), 0.0);

    report(
        "criterion 6 (energy identities)",
        true,
        "expected energy equals weighted power cases; zero-gain saving is zero; saving tends to Eb_u; efficiency(per=1)=0",
    );
}

/// Criterion 7: byte-identical output across repeated runs and worker
/// counts for a fixed master seed.
#[test]
fn criterion_7_determinism_across_runs_and_workers() {
    let text = "[scenario]\n\
                topology = mrc\n\
                strategy = harq-t1\n\
                code = hamming74\n\
                detector = crc4\n\
                payload_bits = 44\n\
                \n\
                [sweep]\n\
                points = 6:6:18\n\
                trials = 3000\n\
                seed = 77\n";
    let config = parse_config(text).unwrap();

    let one = with_workers(1, || render_run(&config)).unwrap().unwrap();
    let eight = with_workers(8, || render_run(&config)).unwrap().unwrap();
    let again = with_workers(8, || render_run(&config)).unwrap().unwrap();
    let pass = one == eight && eight == again;
    report(
        "criterion 7 (determinism)",
        pass,
        &format!(
            "{} bytes of output identical across 1-vs-8 workers and repeated runs",
            one.len()
        ),
    );
    assert_eq!(one, eight, "worker count changed the output");
    assert_eq!(eight, again, "repeated run changed the output");
}
