//! Deterministic table emission: comma- or tab-separated, header row with
//! units, LF line endings, full-precision locale-independent numbers
//! (shortest round-trip formatting).

use crate::config::OutputFormat;
use cooplink::montecarlo::{AnalyticPoint, MetricsRow, SweepSpec};

const SIM_COLUMNS: [&str; 16] = [
    "ber",
    "ber_ci95",
    "ser",
    "ser_ci95",
    "residual_ser",
    "residual_ser_ci95",
    "per",
    "per_ci95",
    "throughput_bps",
    "throughput_ci95",
    "mean_delay_s",
    "mean_delay_ci95",
    "energy_per_packet_j",
    "energy_ci95",
    "efficiency_bits_per_j",
    "trials",
];

const ANALYTIC_COLUMNS: [&str; 6] = [
    "analytic_ser",
    "analytic_ber",
    "analytic_per",
    "analytic_energy_j",
    "analytic_efficiency_bits_per_j",
    "analytic_throughput_bps",
];

fn num(x: f64) -> String {
    format!("{x}")
}

/// Renders one sweep's rows (simulated, analytic or both, by block flags).
/// Row counts must match when both blocks are present.
pub fn scenario_table(
    sweep: &SweepSpec,
    simulated: Option<&[MetricsRow]>,
    analytic: Option<&[AnalyticPoint]>,
    format: OutputFormat,
) -> String {
    let sep = format.separator();
    let mut header = vec![sweep.variable_name().to_string()];
    if simulated.is_some() {
        header.extend(SIM_COLUMNS.iter().map(|s| s.to_string()));
    }
    if analytic.is_some() {
        header.extend(ANALYTIC_COLUMNS.iter().map(|s| s.to_string()));
    }
    let mut out = header.join(&sep.to_string());
    out.push('\n');

    let rows = simulated
        .map(|r| r.len())
        .or_else(|| analytic.map(|a| a.len()))
        .unwrap_or(0);
    for i in 0..rows {
        let mut fields: Vec<String> = Vec::with_capacity(header.len());
        let label = simulated
            .map(|r| r[i].sweep_label.clone())
            .or_else(|| analytic.map(|a| a[i].sweep_label.clone()))
            .unwrap_or_default();
        fields.push(label);
        if let Some(rows) = simulated {
            let r = &rows[i];
            fields.extend(
                [
                    r.ber,
                    r.ber_ci,
                    r.ser,
                    r.ser_ci,
                    r.residual_ser,
                    r.residual_ser_ci,
                    r.per,
                    r.per_ci,
                    r.throughput_bps,
                    r.throughput_ci,
                    r.mean_delay_s,
                    r.mean_delay_ci,
                    r.energy_per_packet_j,
                    r.energy_ci,
                    r.efficiency_bits_per_j,
                ]
                .map(num),
            );
            fields.push(r.trials.to_string());
        }
        if let Some(points) = analytic {
            let a = &points[i];
            fields.extend(
                [
                    a.ser_sd,
                    a.ber_sd,
                    a.per,
                    a.energy_per_packet_j,
                    a.efficiency_bits_per_j,
                    a.throughput_bps,
                ]
                .map(num),
            );
        }
        out.push_str(&fields.join(&sep.to_string()));
        out.push('\n');
    }
    out
}

/// Analytic energy table across all three topologies.
pub struct EnergyTableRow {
    pub label: String,
    pub per: [f64; 3],
    pub energy_j: [f64; 3],
    pub efficiency: [f64; 3],
}

pub fn energy_table(
    sweep_name: &str,
    rows: &[EnergyTableRow],
    format: OutputFormat,
) -> String {
    let sep = format.separator().to_string();
    let mut out = [
        sweep_name,
        "per_dt",
        "per_src",
        "per_mrc",
        "energy_dt_j",
        "energy_src_j",
        "energy_mrc_j",
        "efficiency_dt_bits_per_j",
        "efficiency_src_bits_per_j",
        "efficiency_mrc_bits_per_j",
    ]
    .join(&sep);
    out.push('\n');
    for r in rows {
        let mut fields = vec![r.label.clone()];
        fields.extend(r.per.map(num));
        fields.extend(r.energy_j.map(num));
        fields.extend(r.efficiency.map(num));
        out.push_str(&fields.join(&sep));
        out.push('\n');
    }
    out
}

/// Splits rendered table text into trimmed fields and re-joins it; the
/// result is byte-identical for tables this module produced.
pub fn reparse_table(text: &str, format: OutputFormat) -> String {
    let sep = format.separator();
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let fields: Vec<&str> = line.split(sep).collect();
        out.push_str(&fields.join(&sep.to_string()));
        out.push('\n');
    }
    out
}
