//! Quantity parsing with explicit unit suffixes.
//!
//! Config files mix scales freely (nm wavelengths, µm waists, mm lengths,
//! kV drives), so every dimensioned value must carry a unit suffix and is
//! converted to SI base units (m, V, V/m, m/V) at parse time. Emission uses
//! base units only with 17 significant digits so files round-trip losslessly.

/// Dimension expected for a config value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Voltage,
    /// Electric field, V/m.
    Field,
    /// Electrooptic coefficient, m/V.
    EoCoefficient,
    Dimensionless,
}

impl Dimension {
    pub fn base_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Voltage => "V",
            Dimension::Field => "V/m",
            Dimension::EoCoefficient => "m/V",
            Dimension::Dimensionless => "",
        }
    }
}

/// Scale from `unit` to base units as an exact (multiplier, divisor) pair.
/// Both entries are exactly representable powers of ten, so `v * num / den`
/// is a single correctly rounded operation and `30 um` equals the literal
/// `30e-6` bit for bit.
fn unit_scale(dim: Dimension, unit: &str) -> Option<(f64, f64)> {
    let f = match dim {
        Dimension::Length => match unit {
            "m" => (1.0, 1.0),
            "mm" => (1.0, 1e3),
            "um" | "µm" => (1.0, 1e6),
            "nm" => (1.0, 1e9),
            "pm" => (1.0, 1e12),
            _ => return None,
        },
        Dimension::Voltage => match unit {
            "V" => (1.0, 1.0),
            "kV" => (1e3, 1.0),
            "mV" => (1.0, 1e3),
            _ => return None,
        },
        Dimension::Field => match unit {
            "V/m" => (1.0, 1.0),
            "kV/m" | "V/mm" => (1e3, 1.0),
            "MV/m" | "kV/mm" | "V/um" | "V/µm" => (1e6, 1.0),
            "kV/cm" => (1e5, 1.0),
            _ => return None,
        },
        Dimension::EoCoefficient => match unit {
            "m/V" => (1.0, 1.0),
            "pm/V" => (1.0, 1e12),
            "nm/V" => (1.0, 1e9),
            _ => return None,
        },
        Dimension::Dimensionless => return None,
    };
    Some(f)
}

/// Parses `value [unit]` into SI base units for the expected dimension.
///
/// Dimensioned values must carry a unit; bare numbers are rejected for
/// everything except `Dimensionless`, which in turn rejects any suffix.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value".to_owned());
    }
    let split = text
        .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .unwrap_or(text.len());
    // A sign or exponent marker can follow a digit ("1e-3"); the scan above
    // already treats those as numeric, so `split` points at the unit start.
    let (num_part, unit_part) = text.split_at(split);
    let value: f64 = num_part
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", num_part.trim()))?;
    if !value.is_finite() {
        return Err(format!("`{num_part}` is not finite"));
    }
    let unit = unit_part.trim();

    match dim {
        Dimension::Dimensionless => {
            if unit.is_empty() {
                Ok(value)
            } else {
                Err(format!("unexpected unit `{unit}` on a dimensionless value"))
            }
        }
        _ => {
            if unit.is_empty() {
                return Err(format!(
                    "missing unit (expected {}, e.g. `{}`)",
                    dim.base_unit(),
                    dim.base_unit()
                ));
            }
            match unit_scale(dim, unit) {
                Some((num, den)) => Ok(value * num / den),
                None => Err(format!(
                    "unknown unit `{unit}` (expected a {} unit)",
                    dim.base_unit()
                )),
            }
        }
    }
}

/// Formats a value in SI base units with 17 significant digits, which is
/// enough for `f64` to round-trip exactly.
pub fn format_si(value: f64, dim: Dimension) -> String {
    let unit = dim.base_unit();
    if unit.is_empty() {
        format!("{value:.16e}")
    } else {
        format!("{value:.16e} {unit}")
    }
}

pub const MRAD_PER_RAD: f64 = 1e3;
