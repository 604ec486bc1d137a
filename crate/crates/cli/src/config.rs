//! Sectioned key=value configuration: parsing with line-accurate errors,
//! strict key checking (typos are errors, never silently ignored), and a
//! stable emitter that round-trips.

use cooplink::channel::LinkSpec;
use cooplink::codecs::{CodeKind, CodeSpec};
use cooplink::cooperation::{Topology, TopologyKind};
use cooplink::energy::{EnergyParams, MrcEnergyModel};
use cooplink::error_control::{AckErrorModel, ProtocolConfig, Strategy};
use cooplink::modem::ModulationSpec;
use cooplink::montecarlo::{Scenario, SweepSpec};
use std::collections::BTreeMap;
use std::fmt;

/// Configuration error with the offending line or key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "config line {l}: key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "config line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "config key `{k}`: {}", self.message),
            (None, None) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err_at(line: usize, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), key: Some(key.to_string()), message: message.into() }
}

fn err_key(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line: None, key: Some(key.to_string()), message: message.into() }
}

/// Output format of emitted tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Tsv,
}

impl OutputFormat {
    pub fn separator(&self) -> char {
        match self {
            OutputFormat::Csv => ',',
            OutputFormat::Tsv => '\t',
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Tsv => "tsv",
        }
    }
}

/// Fully validated run configuration: the scenario plus output options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub format: OutputFormat,
    pub emit_analytic: bool,
    pub emit_simulated: bool,
    /// Worker threads for the trial engine; 0 means all available cores.
    pub workers: usize,
}

/// Raw parsed key with its line number, consumed exactly once.
struct RawKeys {
    entries: BTreeMap<(String, String), (usize, String, bool)>,
}

impl RawKeys {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entries
            .get_mut(&(section.to_string(), key.to_string()))
            .map(|(line, value, used)| {
                *used = true;
                (*line, value.clone())
            })
    }

    fn unused(&self) -> Option<(usize, String, String)> {
        self.entries
            .iter()
            .filter(|(_, (_, _, used))| !used)
            .map(|((s, k), (line, _, _))| (*line, s.clone(), k.clone()))
            .min()
    }
}

fn tokenize(text: &str) -> Result<RawKeys, ConfigError> {
    let known_sections = [
        "scenario", "topology", "modulation", "energy", "sweep", "output",
    ];
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError {
                line: Some(line_no),
                key: None,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if !known_sections.contains(&name) {
                return Err(ConfigError {
                    line: Some(line_no),
                    key: None,
                    message: format!(
                        "unknown section `[{name}]` (expected one of {})",
                        known_sections.map(|s| format!("[{s}]")).join(", ")
                    ),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError {
            line: Some(line_no),
            key: None,
            message: "expected `key = value`".into(),
        })?;
        if section.is_empty() {
            return Err(ConfigError {
                line: Some(line_no),
                key: Some(key.trim().to_string()),
                message: "key appears before any [section] header".into(),
            });
        }
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if entries
            .insert((section.clone(), key.clone()), (line_no, value, false))
            .is_some()
        {
            return Err(err_at(line_no, &key, "duplicate key"));
        }
    }
    Ok(RawKeys { entries })
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>().map_err(|_| err_at(line, key, format!("`{v}` is not a number")))
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>().map_err(|_| err_at(line, key, format!("`{v}` is not a non-negative integer")))
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse::<u64>().map_err(|_| err_at(line, key, format!("`{v}` is not a non-negative integer")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err_at(line, key, format!("`{v}` is not `true` or `false`"))),
    }
}

fn parse_code(line: usize, key: &str, v: &str) -> Result<CodeSpec, ConfigError> {
    let fields: Vec<&str> = v.split_whitespace().collect();
    match fields.as_slice() {
        ["none"] => Ok(CodeSpec::none()),
        ["crc4"] => Ok(CodeSpec::crc4()),
        ["hamming74"] => Ok(CodeSpec::hamming74()),
        ["rs", n, k] => {
            let n: usize =
                n.parse().map_err(|_| err_at(line, key, format!("`{n}` is not an integer")))?;
            let k: usize =
                k.parse().map_err(|_| err_at(line, key, format!("`{k}` is not an integer")))?;
            if n < 3 || !(n + 1).is_power_of_two() {
                return Err(err_at(line, key, format!("rs N must be 2^m - 1, got {n}")));
            }
            let m = (n + 1).trailing_zeros();
            CodeSpec::reed_solomon(m, n, k).map_err(|e| err_at(line, key, e.to_string()))
        }
        _ => Err(err_at(
            line,
            key,
            format!("`{v}` is not one of none | crc4 | hamming74 | rs N K"),
        )),
    }
}

/// `start:step:stop` (inclusive, fixed step) or a comma list.
fn parse_points(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(err_at(line, key, "range must be start:step:stop"));
        }
        let start = parse_f64(line, key, parts[0].trim())?;
        let step = parse_f64(line, key, parts[1].trim())?;
        let stop = parse_f64(line, key, parts[2].trim())?;
        if !(step > 0.0) {
            return Err(err_at(line, key, "range step must be > 0"));
        }
        let mut out = Vec::new();
        let mut x = start;
        while x <= stop + 1e-9 * step {
            out.push(x);
            x = start + step * (out.len() as f64);
        }
        Ok(out)
    } else {
        v.split(',')
            .map(|s| parse_f64(line, key, s.trim()))
            .collect()
    }
}

fn code_label_list(line: usize, key: &str, v: &str) -> Result<Vec<CodeSpec>, ConfigError> {
    v.split(',').map(|s| parse_code(line, key, s.trim())).collect()
}

/// Parses and validates a configuration file. Unknown keys are errors;
/// every omitted key takes the documented default.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut raw = tokenize(text)?;

    // [scenario]
    let topology_kind = match raw.take("scenario", "topology") {
        Some((line, v)) => match v.as_str() {
            "dt" => TopologyKind::Dt,
            "src" => TopologyKind::Src,
            "mrc" => TopologyKind::Mrc,
            other => return Err(err_at(line, "topology", format!("`{other}` is not dt | src | mrc"))),
        },
        None => TopologyKind::Dt,
    };
    let strategy = match raw.take("scenario", "strategy") {
        Some((line, v)) => match v.as_str() {
            "fec" => Strategy::FecOnly,
            "sw-arq" => Strategy::SwArq,
            "harq-t1" => Strategy::HarqType1,
            "harq-t2" => Strategy::HarqType2,
            other => {
                return Err(err_at(
                    line,
                    "strategy",
                    format!("`{other}` is not fec | sw-arq | harq-t1 | harq-t2"),
                ))
            }
        },
        None => Strategy::FecOnly,
    };
    let code = match raw.take("scenario", "code") {
        Some((line, v)) => parse_code(line, "code", &v)?,
        None => CodeSpec::none(),
    };
    let detector = match raw.take("scenario", "detector") {
        Some((line, v)) => {
            let spec = parse_code(line, "detector", &v)?;
            if !matches!(spec.kind(), CodeKind::None | CodeKind::Crc4) {
                return Err(err_at(line, "detector", "must be none or crc4"));
            }
            spec
        }
        // Feedback strategies need detection; one-shot FEC defaults bare.
        None => {
            if strategy.uses_feedback() {
                CodeSpec::crc4()
            } else {
                CodeSpec::none()
            }
        }
    };
    let payload_bits = match raw.take("scenario", "payload_bits") {
        Some((line, v)) => {
            let n = parse_usize(line, "payload_bits", &v)?;
            if n == 0 {
                return Err(err_at(line, "payload_bits", "must be > 0"));
            }
            n
        }
        None => 88,
    };
    let max_retransmissions = match raw.take("scenario", "max_retransmissions") {
        Some((line, v)) => parse_usize(line, "max_retransmissions", &v)? as u32,
        None => 16,
    };
    let timeout_s = match raw.take("scenario", "timeout_s") {
        Some((line, v)) => {
            let t = parse_f64(line, "timeout_s", &v)?;
            if !(t > 0.0) {
                return Err(err_at(line, "timeout_s", "must be > 0"));
            }
            Some(t)
        }
        None => None,
    };
    let ack_error_model = match raw.take("scenario", "ack_error_model") {
        Some((line, v)) => match v.as_str() {
            "ideal" => AckErrorModel::Ideal,
            "same-channel" => AckErrorModel::SameChannel,
            other => {
                return Err(err_at(
                    line,
                    "ack_error_model",
                    format!("`{other}` is not ideal | same-channel"),
                ))
            }
        },
        None => AckErrorModel::SameChannel,
    };

    // [modulation]
    let modulation = match raw.take("modulation", "bits_per_symbol") {
        Some((line, v)) => {
            let b = parse_usize(line, "bits_per_symbol", &v)? as u32;
            ModulationSpec::from_bits_per_symbol(b)
                .map_err(|e| err_at(line, "bits_per_symbol", e.to_string()))?
        }
        None => ModulationSpec::from_bits_per_symbol(2).expect("default modulation"),
    };

    // [topology]
    let take_pos = |raw: &mut RawKeys, key: &str, default: f64| -> Result<f64, ConfigError> {
        match raw.take("topology", key) {
            Some((line, v)) => {
                let x = parse_f64(line, key, &v)?;
                if !(x > 0.0) {
                    return Err(err_at(line, key, "must be > 0"));
                }
                Ok(x)
            }
            None => Ok(default),
        }
    };
    let sd_distance = take_pos(&mut raw, "sd_distance_m", 100.0)?;
    let path_loss = match raw.take("topology", "path_loss_exponent") {
        Some((line, v)) => {
            let x = parse_f64(line, "path_loss_exponent", &v)?;
            if !(x >= 0.0) {
                return Err(err_at(line, "path_loss_exponent", "must be >= 0"));
            }
            x
        }
        None => 2.0,
    };
    let tx_power = take_pos(&mut raw, "tx_power_w", 1e-3)?;
    let noise_power = take_pos(&mut raw, "noise_power_w", 1e-10)?;
    let relay_list = |raw: &mut RawKeys, key: &str, n: usize| -> Result<Vec<f64>, ConfigError> {
        match raw.take("topology", key) {
            Some((line, v)) => {
                let ds: Result<Vec<f64>, _> =
                    v.split(',').map(|s| parse_f64(line, key, s.trim())).collect();
                let ds = ds?;
                if ds.len() != n {
                    return Err(err_at(
                        line,
                        key,
                        format!("{} topology needs exactly {n} value(s)", topology_kind.label()),
                    ));
                }
                if ds.iter().any(|d| !(*d > 0.0)) {
                    return Err(err_at(line, key, "distances must be > 0"));
                }
                Ok(ds)
            }
            None => Ok(vec![sd_distance / 2.0; n]),
        }
    };
    let relays = topology_kind.relays();
    let sr_distances = relay_list(&mut raw, "sr_distances_m", relays)?;
    let rd_distances = relay_list(&mut raw, "rd_distances_m", relays)?;

    let link = |d: f64| LinkSpec::new(d, path_loss, tx_power, noise_power);
    let topology = (|| -> cooplink::Result<Topology> {
        Topology::new(
            topology_kind,
            link(sd_distance)?,
            sr_distances.iter().copied().map(link).collect::<cooplink::Result<_>>()?,
            rd_distances.iter().copied().map(link).collect::<cooplink::Result<_>>()?,
        )
    })()
    .map_err(|e| err_key("topology", e.to_string()))?;

    // [energy]
    let beta = match raw.take("energy", "beta") {
        Some((line, v)) => {
            let b = parse_f64(line, "beta", &v)?;
            if !(b > 0.0 && b < 1.0) {
                return Err(err_at(line, "beta", "must satisfy 0 < beta < 1"));
            }
            b
        }
        None => 0.5,
    };
    let tx_circuit = match raw.take("energy", "tx_circuit_w") {
        Some((line, v)) => parse_f64(line, "tx_circuit_w", &v)?,
        None => 0.1,
    };
    let rx_circuit = match raw.take("energy", "rx_circuit_w") {
        Some((line, v)) => parse_f64(line, "rx_circuit_w", &v)?,
        None => 0.1,
    };
    let symbol_rate = match raw.take("energy", "symbol_rate_baud") {
        Some((line, v)) => {
            let r = parse_f64(line, "symbol_rate_baud", &v)?;
            if !(r > 0.0) {
                return Err(err_at(line, "symbol_rate_baud", "must be > 0"));
            }
            r
        }
        None => 5e5,
    };
    let mrc_energy_model = match raw.take("energy", "mrc_energy_model") {
        Some((line, v)) => match v.as_str() {
            "native" => MrcEnergyModel::Native,
            "power-consistent" => MrcEnergyModel::PowerConsistent,
            other => {
                return Err(err_at(
                    line,
                    "mrc_energy_model",
                    format!("`{other}` is not native | power-consistent"),
                ))
            }
        },
        None => MrcEnergyModel::Native,
    };
    let charge_ack_energy = match raw.take("energy", "charge_ack_energy") {
        Some((line, v)) => parse_bool(line, "charge_ack_energy", &v)?,
        None => false,
    };

    // [sweep]
    let variable = match raw.take("sweep", "variable") {
        Some((line, v)) => match v.as_str() {
            "snr_db" | "ber" | "distance" | "code" => (line, v),
            other => {
                return Err(err_at(
                    line,
                    "variable",
                    format!("`{other}` is not snr_db | ber | distance | code"),
                ))
            }
        },
        None => (0, "snr_db".to_string()),
    };
    let sweep = if variable.1 == "code" {
        match raw.take("sweep", "codes") {
            Some((line, v)) => SweepSpec::Code(code_label_list(line, "codes", &v)?),
            None => {
                return Err(err_key("codes", "required when sweep variable is `code`"));
            }
        }
    } else {
        let points = match raw.take("sweep", "points") {
            Some((line, v)) => parse_points(line, "points", &v)?,
            None => match variable.1.as_str() {
                "snr_db" => (0..=30).map(f64::from).collect(),
                "ber" => log_spaced(1e-5, 1e-1, 17),
                _ => (1..=10).map(|i| f64::from(i) * 20.0).collect(),
            },
        };
        match variable.1.as_str() {
            "snr_db" => SweepSpec::SnrDb(points),
            "ber" => SweepSpec::Ber(points),
            _ => SweepSpec::Distance(points),
        }
    };
    let trials_per_point = match raw.take("sweep", "trials") {
        Some((line, v)) => {
            let t = parse_u64(line, "trials", &v)?;
            if t == 0 {
                return Err(err_at(line, "trials", "must be >= 1"));
            }
            t
        }
        None => 100_000,
    };
    let master_seed = match raw.take("sweep", "seed") {
        Some((line, v)) => parse_u64(line, "seed", &v)?,
        None => 1,
    };
    let workers = match raw.take("sweep", "workers") {
        Some((line, v)) => parse_usize(line, "workers", &v)?,
        None => 0,
    };

    // [output]
    let format = match raw.take("output", "format") {
        Some((line, v)) => match v.as_str() {
            "csv" => OutputFormat::Csv,
            "tsv" => OutputFormat::Tsv,
            other => return Err(err_at(line, "format", format!("`{other}` is not csv | tsv"))),
        },
        None => OutputFormat::Csv,
    };
    let emit_analytic = match raw.take("output", "emit_analytic") {
        Some((line, v)) => parse_bool(line, "emit_analytic", &v)?,
        None => true,
    };
    let emit_simulated = match raw.take("output", "emit_simulated") {
        Some((line, v)) => parse_bool(line, "emit_simulated", &v)?,
        None => true,
    };
    if !emit_analytic && !emit_simulated {
        return Err(err_key(
            "emit_simulated",
            "at least one of emit_analytic / emit_simulated must be true",
        ));
    }

    if let Some((line, section, key)) = raw.unused() {
        return Err(ConfigError {
            line: Some(line),
            key: Some(key),
            message: format!("unknown key in [{section}]"),
        });
    }

    let protocol = ProtocolConfig {
        strategy,
        code,
        detector,
        max_retransmissions,
        timeout_s,
        ack_error_model,
        payload_bits,
    };
    protocol.validate().map_err(|e| match e {
        cooplink::Error::InvalidConfig(msg) if msg.contains("detector") => {
            err_key("detector", msg)
        }
        cooplink::Error::InvalidConfig(msg) if msg.contains("error-correcting") => {
            err_key("code", msg)
        }
        other => err_key("strategy", other.to_string()),
    })?;

    let bits_per_symbol = modulation.bits_per_symbol();
    let energy = EnergyParams {
        tx_power_w: tx_power,
        amplifier_loss: beta,
        tx_circuit_w: tx_circuit,
        rx_circuit_w: rx_circuit,
        frame_bits: protocol.coded_frame_bits() as u64,
        payload_bits: payload_bits as u64,
        bit_rate_bps: symbol_rate * f64::from(bits_per_symbol),
        symbol_rate_baud: symbol_rate,
    };
    energy.validate().map_err(|e| err_key("energy", e.to_string()))?;

    let scenario = Scenario {
        topology,
        modulation,
        protocol,
        energy,
        sweep,
        trials_per_point,
        master_seed,
        charge_ack_energy,
        mrc_energy_model,
    };
    scenario.validate().map_err(|e| err_key("sweep", e.to_string()))?;

    Ok(RunConfig { scenario, format, emit_analytic, emit_simulated, workers })
}

/// Log-spaced grid, inclusive of both endpoints.
pub fn log_spaced(from: f64, to: f64, n: usize) -> Vec<f64> {
    let (lf, lt) = (from.log10(), to.log10());
    (0..n)
        .map(|i| 10f64.powf(lf + (lt - lf) * i as f64 / (n - 1) as f64))
        .collect()
}

fn code_text(code: &CodeSpec) -> String {
    match code.kind() {
        CodeKind::None => "none".into(),
        CodeKind::Crc4 => "crc4".into(),
        CodeKind::Hamming74 => "hamming74".into(),
        CodeKind::ReedSolomon { n, k, .. } => format!("rs {n} {k}"),
    }
}

/// Renders a configuration back to the sectioned text format. Parsing the
/// result reproduces an equivalent configuration.
pub fn emit_config(config: &RunConfig) -> String {
    let s = &config.scenario;
    let p = &s.protocol;
    let t = &s.topology;
    let mut out = String::new();
    out.push_str("[scenario]\n");
    out.push_str(&format!("topology = {}\n", t.kind().label()));
    out.push_str(&format!("strategy = {}\n", p.strategy.label()));
    out.push_str(&format!("code = {}\n", code_text(&p.code)));
    out.push_str(&format!("detector = {}\n", code_text(&p.detector)));
    out.push_str(&format!("payload_bits = {}\n", p.payload_bits));
    out.push_str(&format!("max_retransmissions = {}\n", p.max_retransmissions));
    if let Some(timeout) = p.timeout_s {
        out.push_str(&format!("timeout_s = {timeout}\n"));
    }
    out.push_str(&format!("ack_error_model = {}\n", p.ack_error_model.label()));
    out.push('\n');
    out.push_str("[topology]\n");
    out.push_str(&format!("sd_distance_m = {}\n", t.link_sd().distance_m));
    if !t.links_sr().is_empty() {
        let list = |links: &[LinkSpec]| {
            links.iter().map(|l| l.distance_m.to_string()).collect::<Vec<_>>().join(", ")
        };
        out.push_str(&format!("sr_distances_m = {}\n", list(t.links_sr())));
        out.push_str(&format!("rd_distances_m = {}\n", list(t.links_rd())));
    }
    out.push_str(&format!("path_loss_exponent = {}\n", t.link_sd().path_loss_exponent));
    out.push_str(&format!("tx_power_w = {}\n", t.link_sd().tx_power_w));
    out.push_str(&format!("noise_power_w = {}\n", t.link_sd().noise_power_w));
    out.push('\n');
    out.push_str("[modulation]\n");
    out.push_str(&format!("bits_per_symbol = {}\n", s.modulation.bits_per_symbol()));
    out.push('\n');
    out.push_str("[energy]\n");
    out.push_str(&format!("beta = {}\n", s.energy.amplifier_loss));
    out.push_str(&format!("tx_circuit_w = {}\n", s.energy.tx_circuit_w));
    out.push_str(&format!("rx_circuit_w = {}\n", s.energy.rx_circuit_w));
    out.push_str(&format!("symbol_rate_baud = {}\n", s.energy.symbol_rate_baud));
    out.push_str(&format!("mrc_energy_model = {}\n", s.mrc_energy_model.label()));
    out.push_str(&format!("charge_ack_energy = {}\n", s.charge_ack_energy));
    out.push('\n');
    out.push_str("[sweep]\n");
    out.push_str(&format!("variable = {}\n", sweep_variable_key(&s.sweep)));
    match &s.sweep {
        SweepSpec::Code(codes) => {
            let list = codes.iter().map(code_text).collect::<Vec<_>>().join(", ");
            out.push_str(&format!("codes = {list}\n"));
        }
        SweepSpec::SnrDb(points) | SweepSpec::Ber(points) | SweepSpec::Distance(points) => {
            let list = points.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
            out.push_str(&format!("points = {list}\n"));
        }
    }
    out.push_str(&format!("trials = {}\n", s.trials_per_point));
    out.push_str(&format!("seed = {}\n", s.master_seed));
    out.push_str(&format!("workers = {}\n", config.workers));
    out.push('\n');
    out.push_str("[output]\n");
    out.push_str(&format!("format = {}\n", config.format.label()));
    out.push_str(&format!("emit_analytic = {}\n", config.emit_analytic));
    out.push_str(&format!("emit_simulated = {}\n", config.emit_simulated));
    out
}

fn sweep_variable_key(sweep: &SweepSpec) -> &'static str {
    match sweep {
        SweepSpec::SnrDb(_) => "snr_db",
        SweepSpec::Ber(_) => "ber",
        SweepSpec::Distance(_) => "distance",
        SweepSpec::Code(_) => "code",
    }
}
