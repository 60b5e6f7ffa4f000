//! Structured run report: JSON with a fixed field order, no timestamps,
//! and lossless f64 round-tripping (shortest-repr serialization).
//!
//! Angles appear in radians (SI, for machines) and mrad (for reading);
//! every other quantity is SI base units with a unit-suffixed field name.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    /// Subcommand that produced this report: design, simulate, or compare.
    pub command: String,
    /// Widening convention the trajectory used: design or selfconsistent.
    pub widening_mode: String,
    pub inputs: InputBlock,
    /// Full index contrast across a domain wall at the drive voltage.
    pub dn: f64,
    pub poling: PolingBlock,
    pub horn: HornBlock,
    pub spots: SpotBlock,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparator: Option<ComparatorBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scan: Option<Vec<ScanEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fan: Option<FanBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputBlock {
    pub n_e: f64,
    pub r33_m_per_v: f64,
    pub e_pole_v_per_m: f64,
    pub voltage_v: f64,
    pub thickness_m: f64,
    pub lambda0_m: f64,
    pub waist_radius_m: f64,
    pub length_m: f64,
    pub n_interfaces: u32,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolingBlock {
    /// |E3| / E_pole at the drive voltage.
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HornBlock {
    pub entrance_width_m: f64,
    pub exit_width_m: f64,
    pub entrance_width_design_m: f64,
    pub exit_width_design_m: f64,
    pub theta_int_rad: f64,
    pub theta_ext_rad: f64,
    pub theta_ext_mrad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotBlock {
    pub delta_theta_rad: f64,
    pub delta_theta_mrad: f64,
    /// Bipolar fan count at the drive voltage's designed deflection.
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparatorBlock {
    pub rect_width_m: f64,
    pub rect_required_dn: f64,
    /// Voltage the rectangle needs relative to the horn.
    pub voltage_ratio: f64,
    pub sensitivity_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanEntry {
    pub voltage_v: f64,
    pub theta_int_rad: f64,
    pub theta_ext_rad: f64,
    pub theta_ext_mrad: f64,
    pub exit_radius_m: f64,
    pub truncation_loss: f64,
    pub spots_total: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanBlock {
    pub theta_max_ext_rad: f64,
    pub theta_max_ext_mrad: f64,
    /// Bipolar fan count at the largest simulated deflection.
    pub spots_total: u32,
}

/// Serializes a report; deterministic for identical inputs.
pub fn render_report(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::invalid("report", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses and validates report text (strict: unknown fields are rejected).
pub fn parse_report(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), None, e.to_string()))
}
