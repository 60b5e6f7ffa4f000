//! Run configuration: parsing, defaults, validation, and emission.
//!
//! The format is flat `key = value` lines under `[section]` headers, with
//! `#` comments. Dimensioned values need a unit suffix (resolved by
//! [`crate::units`]); defaults are the published device so an empty config
//! is a complete run. [`emit`] writes the resolved config in SI base units
//! at 17 significant digits, which re-parses to the identical config.

use crate::bpm::GridSpec;
use crate::design::{DesignParams, WideningMode};
use crate::eo::{self, BeamSpec, DriveSpec, MaterialSpec};
use crate::error::{Error, Result};
use crate::units::{format_si, parse_quantity, Dimension};

/// Fully resolved inputs for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub material: MaterialSpec,
    pub drive: DriveSpec,
    pub beam: BeamSpec,
    pub design: DesignParams,
    pub grid: GridSpec,
    /// Sweep voltages, sorted and unique, volts.
    pub sweep: Vec<f64>,
    /// Whether reports include the rectangular-scanner comparator block.
    pub comparator: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let drive = DriveSpec {
            voltage: 1000.0,
            thickness: 150e-6,
        };
        RunConfig {
            material: MaterialSpec::litao3(),
            sweep: linspace_sweep(drive.voltage, 11),
            drive,
            beam: BeamSpec {
                lambda0: 0.6328e-6,
                waist_radius: 30e-6,
            },
            design: DesignParams::default(),
            grid: GridSpec::default(),
            comparator: true,
        }
    }
}

/// `n` voltages evenly spaced over [-|v|, +|v|].
fn linspace_sweep(v: f64, n: u32) -> Vec<f64> {
    let v = v.abs();
    if n <= 1 || v == 0.0 {
        return vec![if n <= 1 { v } else { 0.0 }];
    }
    let step = 2.0 * v / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| -v + i as f64 * step).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn perr(line: usize, key: Option<&str>, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.map(str::to_owned),
        msg: msg.into(),
    }
}

struct Pending {
    config: RunConfig,
    sweep_list: Option<(usize, Vec<f64>)>,
    sweep_points: Option<(usize, u32)>,
    voltage_line: usize,
    seen: std::collections::BTreeSet<String>,
}

impl Pending {
    fn mark(&mut self, line: usize, section: &str, key: &str) -> Result<()> {
        let full = format!("{section}.{key}");
        if !self.seen.insert(full.clone()) {
            return Err(perr(line, Some(key), format!("duplicate key `{full}`")));
        }
        Ok(())
    }
}

/// Parses and fully validates a config, filling defaults for absent keys.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut p = Pending {
        config: RunConfig::default(),
        sweep_list: None,
        sweep_points: None,
        voltage_line: 0,
        seen: std::collections::BTreeSet::new(),
    };
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| perr(lineno, None, "unterminated section header"))?
                .trim();
            match name {
                "material" | "drive" | "beam" | "design" | "grid" | "output" => {
                    section = name.to_owned();
                }
                other => return Err(perr(lineno, None, format!("unknown section `[{other}]`"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| perr(lineno, None, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if section.is_empty() {
            return Err(perr(lineno, Some(key), "key appears before any [section]"));
        }
        p.mark(lineno, &section, key)?;
        apply_key(&mut p, lineno, &section, key, value)?;
    }

    finalize(p)
}

fn quantity(line: usize, key: &str, value: &str, dim: Dimension) -> Result<f64> {
    parse_quantity(value, dim).map_err(|msg| perr(line, Some(key), msg))
}

fn integer<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| perr(line, Some(key), format!("`{value}` is not a valid integer")))
}

fn apply_key(p: &mut Pending, line: usize, section: &str, key: &str, value: &str) -> Result<()> {
    let c = &mut p.config;
    match (section, key) {
        ("material", "n_e") => {
            c.material.n_e = quantity(line, key, value, Dimension::Dimensionless)?
        }
        ("material", "r33") => {
            c.material.r33 = quantity(line, key, value, Dimension::EoCoefficient)?
        }
        ("material", "e_pole") => c.material.e_pole = quantity(line, key, value, Dimension::Field)?,
        ("material", "safety_fraction") => {
            c.material.safety_fraction = quantity(line, key, value, Dimension::Dimensionless)?
        }
        ("drive", "voltage") => {
            c.drive.voltage = quantity(line, key, value, Dimension::Voltage)?;
            p.voltage_line = line;
        }
        ("drive", "thickness") => {
            c.drive.thickness = quantity(line, key, value, Dimension::Length)?
        }
        ("drive", "sweep") => {
            let mut list = Vec::new();
            for part in value.split(',') {
                list.push(quantity(line, key, part, Dimension::Voltage)?);
            }
            if list.is_empty() {
                return Err(perr(line, Some(key), "sweep list is empty"));
            }
            p.sweep_list = Some((line, list));
        }
        ("drive", "sweep_points") => {
            let n: u32 = integer(line, key, value)?;
            if n == 0 {
                return Err(perr(line, Some(key), "sweep_points must be >= 1"));
            }
            p.sweep_points = Some((line, n));
        }
        ("beam", "lambda0") => c.beam.lambda0 = quantity(line, key, value, Dimension::Length)?,
        ("beam", "waist_radius") => {
            c.beam.waist_radius = quantity(line, key, value, Dimension::Length)?
        }
        ("design", "length") => c.design.length = quantity(line, key, value, Dimension::Length)?,
        ("design", "n_interfaces") => c.design.n_interfaces = integer(line, key, value)?,
        ("design", "widening") => {
            c.design.gamma = quantity(line, key, value, Dimension::Dimensionless)?
        }
        ("design", "ode_steps") => c.design.ode_steps = integer(line, key, value)?,
        ("design", "widening_mode") => {
            c.design.widening_mode = WideningMode::from_label(value).ok_or_else(|| {
                perr(
                    line,
                    Some(key),
                    format!("`{value}` is not `design` or `selfconsistent`"),
                )
            })?
        }
        ("grid", "x_span") => c.grid.x_span = quantity(line, key, value, Dimension::Length)?,
        ("grid", "nx") => c.grid.nx = integer(line, key, value)?,
        ("grid", "dz") => c.grid.dz = quantity(line, key, value, Dimension::Length)?,
        ("grid", "absorber_fraction") => {
            c.grid.absorber_fraction = quantity(line, key, value, Dimension::Dimensionless)?
        }
        ("output", "comparator") => {
            c.comparator = match value {
                "true" => true,
                "false" => false,
                other => {
                    return Err(perr(
                        line,
                        Some(key),
                        format!("`{other}` is not `true` or `false`"),
                    ))
                }
            }
        }
        _ => {
            return Err(perr(
                line,
                Some(key),
                format!("unknown key `{key}` in section [{section}]"),
            ))
        }
    }
    Ok(())
}

fn finalize(p: Pending) -> Result<RunConfig> {
    let mut c = p.config;
    c.material.validate()?;
    c.drive.validate()?;
    c.beam.validate()?;
    c.design.validate()?;
    c.grid.validate()?;

    let (sweep_line, mut sweep) = match (p.sweep_list, p.sweep_points) {
        (Some((line, list)), _) => (line, list),
        (None, Some((line, n))) => (line, linspace_sweep(c.drive.voltage, n)),
        (None, None) => (p.voltage_line, linspace_sweep(c.drive.voltage, 11)),
    };
    sweep.sort_by(f64::total_cmp);
    sweep.dedup();
    c.sweep = sweep;

    let check_poling = |line: usize, key: &str, voltage: f64| -> Result<()> {
        let safety = eo::poling_safety(
            &c.material,
            &DriveSpec {
                voltage,
                thickness: c.drive.thickness,
            },
        );
        if !safety.pass {
            return Err(perr(
                line,
                Some(key),
                format!(
                    "drive {voltage} V is poling-unsafe: |E3|/E_pole = {:.2} exceeds the \
                     allowed fraction {:.4}",
                    safety.ratio, c.material.safety_fraction
                ),
            ));
        }
        Ok(())
    };
    check_poling(p.voltage_line, "voltage", c.drive.voltage)?;
    for &v in &c.sweep {
        check_poling(sweep_line, "sweep", v)?;
    }
    Ok(c)
}

/// Writes the resolved config in SI base units; [`parse_config`] of the
/// output reproduces the input exactly.
pub fn emit(c: &RunConfig) -> String {
    use std::fmt::Write;
    let q = |v: f64, d: Dimension| format_si(v, d);
    let mut s = String::new();
    let _ = writeln!(s, "# hornscan configuration (resolved, SI base units)");
    let _ = writeln!(s);
    let _ = writeln!(s, "[material]");
    let _ = writeln!(s, "n_e = {}", q(c.material.n_e, Dimension::Dimensionless));
    let _ = writeln!(s, "r33 = {}", q(c.material.r33, Dimension::EoCoefficient));
    let _ = writeln!(s, "e_pole = {}", q(c.material.e_pole, Dimension::Field));
    let _ = writeln!(
        s,
        "safety_fraction = {}",
        q(c.material.safety_fraction, Dimension::Dimensionless)
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "[drive]");
    let _ = writeln!(s, "voltage = {}", q(c.drive.voltage, Dimension::Voltage));
    let _ = writeln!(s, "thickness = {}", q(c.drive.thickness, Dimension::Length));
    let sweep: Vec<String> = c.sweep.iter().map(|&v| q(v, Dimension::Voltage)).collect();
    let _ = writeln!(s, "sweep = {}", sweep.join(", "));
    let _ = writeln!(s);
    let _ = writeln!(s, "[beam]");
    let _ = writeln!(s, "lambda0 = {}", q(c.beam.lambda0, Dimension::Length));
    let _ = writeln!(
        s,
        "waist_radius = {}",
        q(c.beam.waist_radius, Dimension::Length)
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "[design]");
    let _ = writeln!(s, "length = {}", q(c.design.length, Dimension::Length));
    let _ = writeln!(s, "n_interfaces = {}", c.design.n_interfaces);
    let _ = writeln!(
        s,
        "widening = {}",
        q(c.design.gamma, Dimension::Dimensionless)
    );
    let _ = writeln!(s, "ode_steps = {}", c.design.ode_steps);
    let _ = writeln!(s, "widening_mode = {}", c.design.widening_mode.label());
    let _ = writeln!(s);
    let _ = writeln!(s, "[grid]");
    let _ = writeln!(s, "x_span = {}", q(c.grid.x_span, Dimension::Length));
    let _ = writeln!(s, "nx = {}", c.grid.nx);
    let _ = writeln!(s, "dz = {}", q(c.grid.dz, Dimension::Length));
    let _ = writeln!(
        s,
        "absorber_fraction = {}",
        q(c.grid.absorber_fraction, Dimension::Dimensionless)
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "[output]");
    let _ = writeln!(s, "comparator = {}", c.comparator);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_paper_device() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.material.n_e, 2.1807);
        assert_eq!(c.drive.voltage, 1000.0);
        assert_eq!(c.beam.waist_radius, 30e-6);
        assert_eq!(c.design.n_interfaces, 20);
        assert_eq!(c.design.gamma, 1.3);
        assert_eq!(c.sweep.len(), 11);
        assert_eq!(c.sweep[0], -1000.0);
        assert_eq!(c.sweep[5], 0.0);
        assert_eq!(c.sweep[10], 1000.0);
        assert!(c.comparator);
    }

    #[test]
    fn round_trip_is_identical() {
        let c = RunConfig::default();
        let text = emit(&c);
        let reparsed = parse_config(&text).unwrap();
        assert_eq!(reparsed, c);
        assert_eq!(emit(&reparsed), text);
    }

    #[test]
    fn units_resolve_to_si() {
        let text = "\
[beam]
lambda0 = 632.8 nm
waist_radius = 30 um

[design]
length = 10000 um
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.beam.lambda0, 0.6328e-6);
        assert_eq!(c.beam.waist_radius, 30e-6);
        assert_eq!(c.design.length, 10e-3);

        // Rescaled decimals can land one ulp off the equivalent literal
        // (the mantissa is rounded before the exact power-of-ten divide).
        let rescaled = parse_config("[beam]\nwaist_radius = 0.03 mm\n").unwrap();
        let ulp = 30e-6 - f64::from_bits((30e-6f64).to_bits() - 1);
        assert!((rescaled.beam.waist_radius - 30e-6).abs() <= ulp);
    }

    #[test]
    fn unsafe_drive_is_rejected_at_parse() {
        let text = "\
[drive]
voltage = 5 kV
thickness = 150 um
";
        let err = parse_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1.59"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unsafe_sweep_entry_is_rejected() {
        let text = "\
[drive]
voltage = 1 kV
thickness = 150 um
sweep = -1 kV, 0 V, 2 kV
";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("sweep"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn explicit_sweep_is_sorted_and_deduplicated() {
        let text = "\
[drive]
sweep = 500 V, -500 V, 0 V, 500 V
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.sweep, vec![-500.0, 0.0, 500.0]);
    }

    #[test]
    fn sweep_points_builds_a_linspace() {
        let text = "\
[drive]
voltage = 1 kV
sweep_points = 5
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.sweep, vec![-1000.0, -500.0, 0.0, 500.0, 1000.0]);
        let single = parse_config("[drive]\nsweep_points = 1\n").unwrap();
        assert_eq!(single.sweep, vec![1000.0]);
    }

    #[test]
    fn errors_carry_line_and_key_context() {
        let err = parse_config("[material]\nswag = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("swag"), "{msg}");

        let err = parse_config("[nope]\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");

        let err = parse_config("n_e = 2\n").unwrap_err();
        assert!(err.to_string().contains("before any"), "{err}");

        let err = parse_config("[material]\nn_e 2\n").unwrap_err();
        assert!(err.to_string().contains("key = value"), "{err}");

        let err = parse_config("[material]\nn_e = 2\nn_e = 3\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn unitless_lengths_are_rejected() {
        let err = parse_config("[beam]\nlambda0 = 0.6328\n").unwrap_err();
        assert!(err.to_string().contains("missing unit"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn semantic_validation_still_applies() {
        let err = parse_config("[grid]\nnx = 1000\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_config("[design]\nwidening = 0.5\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_config("[grid]\nnx = 2048.5\n").unwrap_err();
        assert!(err.to_string().contains("integer"), "{err}");
    }

    #[test]
    fn mode_and_comparator_flags() {
        let c = parse_config("[design]\nwidening_mode = design\n").unwrap();
        assert_eq!(c.design.widening_mode, WideningMode::Design);
        let c = parse_config("[output]\ncomparator = false\n").unwrap();
        assert!(!c.comparator);
        assert!(parse_config("[design]\nwidening_mode = wide\n").is_err());
        assert!(parse_config("[output]\ncomparator = yes\n").is_err());
    }

    #[test]
    fn zero_voltage_default_sweep_is_single_point() {
        let c = parse_config("[drive]\nvoltage = 0 V\n").unwrap();
        assert_eq!(c.sweep, vec![0.0]);
    }
}
