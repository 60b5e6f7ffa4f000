//! CSV tables with a byte-exact grammar: LF line endings, a fixed header
//! line, comma-separated `{:.16e}` floats, no padding and no quoting.
//! Rendering the parse of a rendered table reproduces it byte for byte.

use crate::design::{ProfileSample, ScannerProfile};
use crate::error::{Error, Result};

pub const PROFILE_HEADER: &str = "z_m,x_m,slope,omega_m,width_design_m,width_walls_m";
pub const FAN_HEADER: &str = "voltage_V,theta_int_rad,theta_ext_rad,loss";

/// One row of a fan table: the per-voltage outcome of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanRow {
    pub voltage: f64,
    pub theta_int: f64,
    pub theta_ext: f64,
    pub loss: f64,
}

fn push_fields(out: &mut String, fields: &[f64]) {
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{v:.16e}"));
    }
    out.push('\n');
}

pub fn render_profile_csv(profile: &ScannerProfile) -> String {
    let mut out = String::with_capacity(64 * (profile.samples.len() + 1));
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for s in &profile.samples {
        push_fields(
            &mut out,
            &[s.z, s.x, s.slope, s.omega, s.width_design, s.width_walls],
        );
    }
    out
}

pub fn render_fan_csv(rows: &[FanRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(FAN_HEADER);
    out.push('\n');
    for r in rows {
        push_fields(&mut out, &[r.voltage, r.theta_int, r.theta_ext, r.loss]);
    }
    out
}

/// Splits CSV text into the header and data lines, enforcing the grammar:
/// the first line must equal `header`, every data line is non-empty, and
/// the text either is empty after the header or ends with a newline.
fn data_lines(text: &str, header: &str, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.split('\n');
    let first = lines.next().unwrap_or("");
    if first != header {
        return Err(Error::parse(
            1,
            None,
            format!("expected header {header:?}, found {first:?}"),
        ));
    }
    let mut rows = Vec::new();
    let mut saw_terminator = false;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if saw_terminator {
            return Err(Error::parse(lineno - 1, None, "data after final newline"));
        }
        if line.is_empty() {
            saw_terminator = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(Error::parse(
                lineno,
                None,
                format!("expected {columns} columns, found {}", fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(columns);
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(lineno, None, format!("not a number: {f:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(
                    lineno,
                    None,
                    format!("non-finite value: {f:?}"),
                ));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if !saw_terminator && !rows.is_empty() {
        return Err(Error::parse(rows.len() + 1, None, "missing final newline"));
    }
    Ok(rows)
}

pub fn parse_profile_csv(text: &str) -> Result<Vec<ProfileSample>> {
    let rows = data_lines(text, PROFILE_HEADER, 6)?;
    Ok(rows
        .into_iter()
        .map(|r| ProfileSample {
            z: r[0],
            x: r[1],
            slope: r[2],
            omega: r[3],
            width_design: r[4],
            width_walls: r[5],
        })
        .collect())
}

pub fn parse_fan_csv(text: &str) -> Result<Vec<FanRow>> {
    let rows = data_lines(text, FAN_HEADER, 4)?;
    Ok(rows
        .into_iter()
        .map(|r| FanRow {
            voltage: r[0],
            theta_int: r[1],
            theta_ext: r[2],
            loss: r[3],
        })
        .collect())
}
