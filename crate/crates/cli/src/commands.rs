//! Command implementations shared by the binary and the test suites.

use crate::config::{log_spaced, parse_config, ConfigError, OutputFormat, RunConfig};
use crate::csvout::{energy_table, scenario_table, EnergyTableRow};
use cooplink::channel::LinkSpec;
use cooplink::codecs::{self, CodeSpec};
use cooplink::cooperation::{Topology, TopologyKind};
use cooplink::energy::{EnergyParams, MrcEnergyModel};
use cooplink::error_control::{AckErrorModel, ProtocolConfig, Strategy};
use cooplink::modem::ModulationSpec;
use cooplink::montecarlo::{
    analytic_sweep, run_sweep, AnalyticPoint, MetricsRow, Scenario, SweepSpec,
};
use std::fmt;
use std::path::{Path, PathBuf};

/// Command failure: configuration problems exit 1, runtime problems exit 2.
#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Runtime(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 1,
            CommandError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Config(m) => write!(f, "configuration error: {m}"),
            CommandError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e.to_string())
    }
}

impl From<cooplink::Error> for CommandError {
    fn from(e: cooplink::Error) -> Self {
        CommandError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Runtime(e.to_string())
    }
}

fn read_config(path: &Path) -> Result<RunConfig, CommandError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

/// Runs work inside a thread pool of the requested size (0 = default pool).
pub fn with_workers<T: Send>(
    workers: usize,
    job: impl FnOnce() -> T + Send,
) -> Result<T, CommandError> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CommandError::Runtime(e.to_string()))?;
    Ok(pool.install(job))
}

/// Produces the output table for one parsed configuration.
pub fn render_run(config: &RunConfig) -> Result<String, CommandError> {
    let simulated: Option<Vec<MetricsRow>> = if config.emit_simulated {
        Some(with_workers(config.workers, || run_sweep(&config.scenario))??)
    } else {
        None
    };
    let analytic: Option<Vec<AnalyticPoint>> = if config.emit_analytic {
        Some(analytic_sweep(&config.scenario)?)
    } else {
        None
    };
    Ok(scenario_table(
        &config.scenario.sweep,
        simulated.as_deref(),
        analytic.as_deref(),
        config.format,
    ))
}

/// `run` subcommand: simulate the configured sweep and write the table.
pub fn cmd_run(
    config_path: &Path,
    seed_override: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CommandError> {
    let mut config = read_config(config_path)?;
    if let Some(seed) = seed_override {
        config.scenario.master_seed = seed;
    }
    let table = render_run(&config)?;
    write_or_print(out, &table)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CommandError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Default geometry shared by the figure families: a 100 m direct hop with
/// relays halfway, square-law path loss.
fn figure_topology(kind: TopologyKind) -> Topology {
    let sd = LinkSpec::new(100.0, 2.0, 1e-3, 1e-10).expect("default link");
    let relay = LinkSpec::new(50.0, 2.0, 1e-3, 1e-10).expect("default link");
    match kind {
        TopologyKind::Dt => Topology::direct(sd),
        TopologyKind::Src => Topology::single_relay(sd, relay, relay),
        TopologyKind::Mrc => Topology::dual_relay(sd, [relay, relay], [relay, relay]),
    }
    .expect("default topology")
}

fn figure_scenario(
    kind: TopologyKind,
    protocol: ProtocolConfig,
    sweep: SweepSpec,
    trials: u64,
    seed: u64,
) -> Scenario {
    let energy = EnergyParams {
        tx_power_w: 1e-3,
        amplifier_loss: 0.5,
        tx_circuit_w: 0.1,
        rx_circuit_w: 0.1,
        frame_bits: protocol.coded_frame_bits() as u64,
        payload_bits: protocol.payload_bits as u64,
        bit_rate_bps: 1e6,
        symbol_rate_baud: 5e5,
    };
    Scenario {
        topology: figure_topology(kind),
        modulation: ModulationSpec::from_bits_per_symbol(2).expect("qpsk"),
        protocol,
        energy,
        sweep,
        trials_per_point: trials,
        master_seed: seed,
        charge_ack_energy: false,
        mrc_energy_model: MrcEnergyModel::Native,
    }
}

fn fec_protocol(code: CodeSpec) -> ProtocolConfig {
    ProtocolConfig {
        strategy: Strategy::FecOnly,
        code,
        detector: CodeSpec::none(),
        max_retransmissions: 0,
        timeout_s: None,
        ack_error_model: AckErrorModel::Ideal,
        payload_bits: 88,
    }
}

fn sw_arq_protocol() -> ProtocolConfig {
    ProtocolConfig {
        strategy: Strategy::SwArq,
        code: CodeSpec::none(),
        detector: CodeSpec::crc4(),
        max_retransmissions: 16,
        timeout_s: None,
        ack_error_model: AckErrorModel::SameChannel,
        payload_bits: 88,
    }
}

fn harq_t2_protocol() -> ProtocolConfig {
    ProtocolConfig {
        strategy: Strategy::HarqType2,
        code: CodeSpec::hamming74(),
        detector: CodeSpec::crc4(),
        max_retransmissions: 4,
        timeout_s: None,
        ack_error_model: AckErrorModel::SameChannel,
        payload_bits: 88,
    }
}

fn snr_sweep_0_to_20() -> SweepSpec {
    SweepSpec::SnrDb((0..=10).map(|i| f64::from(i) * 2.0).collect())
}

fn ber_sweep_default() -> SweepSpec {
    SweepSpec::Ber(log_spaced(1e-5, 1e-1, 17))
}

/// One named curve of a figure family.
pub struct FigureCurve {
    pub name: &'static str,
    pub scenario: Scenario,
}

/// The preconfigured scenario family behind one figure command.
pub struct FigureFamily {
    pub name: String,
    pub curves: Vec<FigureCurve>,
    /// Also emit the closed-form expectation file.
    pub with_theoretical: bool,
}

/// Builds the scenario family for a figure name:
///
/// * `fig5`: BER against link SNR for uncoded, coded, and coded with one
///   or two relays (one-shot FEC).
/// * `fig6`/`fig7`: stop-and-wait throughput/delay against injected bit
///   error rate for all three topologies plus the closed-form expectation.
/// * `fig8`/`fig9`: hybrid-ARQ residual symbol error rate against SNR with
///   one/two relays, direct transmission as the baseline.
pub fn figure_family(
    name: &str,
    trials_override: Option<u64>,
    seed: u64,
) -> Result<FigureFamily, CommandError> {
    let rs = CodeSpec::reed_solomon(5, 31, 21).expect("default code parameters");
    let family = match name {
        "fig5" => {
            let trials = trials_override.unwrap_or(100_000);
            let curve = |name, kind, code| FigureCurve {
                name,
                scenario: figure_scenario(
                    kind,
                    fec_protocol(code),
                    snr_sweep_0_to_20(),
                    trials,
                    seed,
                ),
            };
            FigureFamily {
                name: name.to_string(),
                curves: vec![
                    curve("uncoded_dt", TopologyKind::Dt, CodeSpec::none()),
                    curve("rs_dt", TopologyKind::Dt, rs.clone()),
                    curve("rs_src", TopologyKind::Src, rs.clone()),
                    curve("rs_mrc", TopologyKind::Mrc, rs),
                ],
            with_theoretical: false,
            }
        }
        "fig6" | "fig7" => {
            let trials = trials_override.unwrap_or(20_000);
            let curve = |label, kind| FigureCurve {
                name: label,
                scenario: figure_scenario(
                    kind,
                    sw_arq_protocol(),
                    ber_sweep_default(),
                    trials,
                    seed,
                ),
            };
            FigureFamily {
                name: name.to_string(),
                curves: vec![
                    curve("dt", TopologyKind::Dt),
                    curve("src", TopologyKind::Src),
                    curve("mrc", TopologyKind::Mrc),
                ],
                with_theoretical: true,
            }
        }
        "fig8" | "fig9" => {
            let trials = trials_override.unwrap_or(50_000);
            let (relay_name, relay_kind) = if name == "fig8" {
                ("harq_src", TopologyKind::Src)
            } else {
                ("harq_mrc", TopologyKind::Mrc)
            };
            let curve = |label, kind| FigureCurve {
                name: label,
                scenario: figure_scenario(
                    kind,
                    harq_t2_protocol(),
                    snr_sweep_0_to_20(),
                    trials,
                    seed,
                ),
            };
            FigureFamily {
                name: name.to_string(),
                curves: vec![curve("harq_dt", TopologyKind::Dt), curve(relay_name, relay_kind)],
                with_theoretical: false,
            }
        }
        other => {
            return Err(CommandError::Config(format!(
                "unknown figure `{other}` (expected fig5..fig9)"
            )))
        }
    };
    Ok(family)
}

/// Renders every curve of a family to `(file name, table text)` pairs.
pub fn render_figure(family: &FigureFamily) -> Result<Vec<(String, String)>, CommandError> {
    let mut outputs = Vec::new();
    for curve in &family.curves {
        let rows = run_sweep(&curve.scenario)?;
        let analytic = analytic_sweep(&curve.scenario)?;
        let table = scenario_table(
            &curve.scenario.sweep,
            Some(&rows),
            Some(&analytic),
            OutputFormat::Csv,
        );
        outputs.push((format!("{}_{}.csv", family.name, curve.name), table));
    }
    if family.with_theoretical {
        // Closed-form stop-and-wait expectation on the direct path.
        let dt = &family.curves[0].scenario;
        let analytic = analytic_sweep(dt)?;
        let mut table = String::from(
            "injected_ber,analytic_per,analytic_throughput_bps,analytic_mean_delay_s\n",
        );
        let cycle =
            dt.energy.tx_time_s(dt.protocol.coded_frame_bits() as u64) + dt.round_trip_s();
        for a in &analytic {
            let delay = if a.per < 1.0 { cycle / (1.0 - a.per) } else { f64::INFINITY };
            table.push_str(&format!(
                "{},{},{},{}\n",
                a.sweep_label, a.per, a.throughput_bps, delay
            ));
        }
        outputs.push((format!("{}_theoretical.csv", family.name), table));
    }
    Ok(outputs)
}

/// `figure` subcommand: writes one CSV per curve into `out_dir`.
pub fn cmd_figure(
    name: &str,
    out_dir: &Path,
    trials: Option<u64>,
    seed: u64,
    workers: usize,
) -> Result<Vec<PathBuf>, CommandError> {
    let family = figure_family(name, trials, seed)?;
    let outputs = with_workers(workers, || render_figure(&family))??;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (file, table) in outputs {
        let path = out_dir.join(file);
        std::fs::write(&path, table)?;
        written.push(path);
    }
    Ok(written)
}

/// Analytic energy/efficiency table across all three topologies for the
/// configured sweep. Relay geometry comes from the config when present and
/// defaults to half the direct distance otherwise.
pub fn render_energy_table(config: &RunConfig) -> Result<String, CommandError> {
    let base = &config.scenario;
    let sd = *base.topology.link_sd();
    let relay =
        base.topology.links_sr().first().copied().unwrap_or_else(|| sd.scaled_distance(0.5));
    let rd =
        base.topology.links_rd().first().copied().unwrap_or_else(|| sd.scaled_distance(0.5));
    let variants = [
        Topology::direct(sd)?,
        Topology::single_relay(sd, relay, rd)?,
        Topology::dual_relay(sd, [relay, relay], [rd, rd])?,
    ];
    let mut per_variant: Vec<Vec<AnalyticPoint>> = Vec::new();
    for v in variants {
        let scenario = Scenario { topology: v, ..base.clone() };
        per_variant.push(analytic_sweep(&scenario)?);
    }
    let rows: Vec<EnergyTableRow> = (0..base.sweep.len())
        .map(|i| EnergyTableRow {
            label: base.sweep.label(i),
            per: [per_variant[0][i].per, per_variant[1][i].per, per_variant[2][i].per],
            energy_j: [
                per_variant[0][i].energy_per_packet_j,
                per_variant[1][i].energy_per_packet_j,
                per_variant[2][i].energy_per_packet_j,
            ],
            efficiency: [
                per_variant[0][i].efficiency_bits_per_j,
                per_variant[1][i].efficiency_bits_per_j,
                per_variant[2][i].efficiency_bits_per_j,
            ],
        })
        .collect();
    Ok(energy_table(base.sweep.variable_name(), &rows, config.format))
}

/// `energy-table` subcommand.
pub fn cmd_energy_table(config_path: &Path, out: Option<&Path>) -> Result<(), CommandError> {
    let config = read_config(config_path)?;
    let table = render_energy_table(&config)?;
    write_or_print(out, &table)
}

/// `codecs selftest` subcommand: built-in exhaustive checks plus vector
/// verification (external file when given, built-in reference set
/// otherwise). Returns a human-readable report.
pub fn run_codecs_selftest(vectors: Option<&Path>) -> Result<String, CommandError> {
    let rt = |e: cooplink::Error| CommandError::Runtime(e.to_string());
    let mut report = String::new();

    // CRC-4: exhaustive single-bit coverage on short payloads.
    for len in 1..=12usize {
        for value in 0u32..(1 << len) {
            let payload: Vec<u8> =
                (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
            let frame = codecs::crc4_append(&payload).map_err(rt)?;
            if !codecs::crc4_check(&frame).map_err(rt)? {
                return Err(CommandError::Runtime("crc4 round trip failed".into()));
            }
            for pos in 0..frame.len() {
                let mut bad = frame.clone();
                bad[pos] ^= 1;
                if codecs::crc4_check(&bad).map_err(rt)? {
                    return Err(CommandError::Runtime(format!(
                        "crc4 missed a single-bit error (len {len}, pos {pos})"
                    )));
                }
            }
        }
    }
    report.push_str("crc4: exhaustive single-bit detection ok\n");

    // Hamming(7,4): all 112 single-bit corruptions.
    for v in 0..16u32 {
        let m: Vec<u8> = (0..4).map(|i| ((v >> (3 - i)) & 1) as u8).collect();
        let code = codecs::hamming74_encode(&m).map_err(rt)?;
        for pos in 0..7 {
            let mut bad = code;
            bad[pos] ^= 1;
            let (decoded, _) = codecs::hamming74_decode(&bad).map_err(rt)?;
            if decoded[..] != m[..] {
                return Err(CommandError::Runtime(format!(
                    "hamming74 failed at message {v}, position {pos}"
                )));
            }
        }
    }
    report.push_str("hamming74: all 112 single-bit corruptions corrected\n");

    // Reed-Solomon: radius checks on the small and the default code.
    let rs = codecs::ReedSolomon::new(3, 7, 3).map_err(rt)?;
    let msg = vec![1u16, 6, 3];
    let cw = rs.encode(&msg).map_err(rt)?;
    for p1 in 0..7usize {
        for p2 in (p1 + 1)..7 {
            let mut rx = cw.clone();
            rx[p1] ^= 5;
            rx[p2] ^= 2;
            let (decoded, status) = rs.decode(&rx).map_err(rt)?;
            if decoded != msg || !status.is_ok() {
                return Err(CommandError::Runtime(format!(
                    "rs(7,3) failed at positions {p1},{p2}"
                )));
            }
        }
    }
    let rs31 = codecs::ReedSolomon::new(5, 31, 21).map_err(rt)?;
    let msg31: Vec<u16> = (0..21).map(|i| (i * 7 + 3) % 32).collect();
    let mut rx = rs31.encode(&msg31).map_err(rt)?;
    for pos in [0usize, 6, 13, 20, 27] {
        rx[pos] ^= 0b1_0110;
    }
    let (decoded, status) = rs31.decode(&rx).map_err(rt)?;
    if decoded != msg31 || !status.is_ok() {
        return Err(CommandError::Runtime("rs(31,21) failed at five errors".into()));
    }
    report.push_str("reed-solomon: rs(7,3) double-error sweep and rs(31,21) five-error check ok\n");

    let text = match vectors {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CommandError::Config(format!("cannot read {}: {e}", path.display())))?,
        None => codecs::vectors::reference_vectors(),
    };
    let n = codecs::vectors::verify_vectors(&text).map_err(rt)?;
    report.push_str(&format!("vectors: {n} conformance cases verified\n"));
    Ok(report)
}
