//! Deterministic SVG rendering of the domain pattern and the deflection fan.
//!
//! Output grammar (documented in docs/FORMATS.md): fixed 900 x 300 canvas,
//! `preserveAspectRatio="none"`, physical scales exposed as `data-um-per-px-*`
//! attributes, pixel coordinates printed with two decimals. No timestamps or
//! random ids, so identical inputs render byte-identical files.

use crate::bpm::SimReport;
use crate::error::{Error, Result};
use crate::pattern::DomainPattern;
use crate::units::MRAD_PER_RAD;

pub const CANVAS_W: f64 = 900.0;
pub const CANVAS_H: f64 = 300.0;
const MARGIN: f64 = 20.0;

const STYLE: &str = "polygon.pos{fill:#e8a14f;stroke:none}\
polygon.neg{fill:#5286b8;stroke:none}\
polyline.wall{fill:none;stroke:#1a1a1a;stroke-width:1.2}\
line.axis{stroke:#888;stroke-width:0.8}\
line.tick{stroke:#444;stroke-width:0.8}\
line.ray{stroke:#b03030;stroke-width:1.0}";

fn svg_open(out: &mut String, um_per_px_z: f64, um_per_px_x: f64) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS_W:.0}\" \
         height=\"{CANVAS_H:.0}\" viewBox=\"0 0 {CANVAS_W:.0} {CANVAS_H:.0}\" \
         preserveAspectRatio=\"none\" data-um-per-px-z=\"{um_per_px_z:.16e}\" \
         data-um-per-px-x=\"{um_per_px_x:.16e}\">\n"
    ));
    out.push_str(&format!("<style>{STYLE}</style>\n"));
}

/// Renders the prism tiling: one polygon per domain, walls as polylines.
/// The z axis runs left to right, +x is up (screen y is flipped).
pub fn render_geometry(pattern: &DomainPattern) -> String {
    let plot_w = CANVAS_W - 2.0 * MARGIN;
    let plot_h = CANVAS_H - 2.0 * MARGIN;
    let (xmin, xmax) = pattern.x_extent();
    let half = xmax.abs().max(xmin.abs()).max(1e-12);
    let len = pattern.length.max(1e-12);

    let px = |p: &[f64; 2]| -> (f64, f64) {
        let zx = MARGIN + p[0] / len * plot_w;
        let xy = MARGIN + (half - p[1]) / (2.0 * half) * plot_h;
        (zx, xy)
    };
    let points = |poly: &[[f64; 2]]| -> String {
        let mut s = String::with_capacity(poly.len() * 14);
        for (i, p) in poly.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let (zx, xy) = px(p);
            s.push_str(&format!("{zx:.2},{xy:.2}"));
        }
        s
    };

    let um_per_px_z = pattern.length * 1e6 / plot_w;
    let um_per_px_x = 2.0 * half * 1e6 / plot_h;
    let mut out = String::new();
    svg_open(&mut out, um_per_px_z, um_per_px_x);
    for (i, prism) in pattern.prisms.iter().enumerate() {
        let class = if prism.polarity > 0 { "pos" } else { "neg" };
        out.push_str(&format!(
            "<polygon class=\"{class}\" data-prism=\"{i}\" data-polarity=\"{}\" points=\"{}\"/>\n",
            prism.polarity,
            points(&prism.vertices)
        ));
    }
    for (name, wall) in [
        ("upper", &pattern.wall_upper),
        ("lower", &pattern.wall_lower),
    ] {
        out.push_str(&format!(
            "<polyline class=\"wall\" data-wall=\"{name}\" points=\"{}\"/>\n",
            points(wall)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Renders the simulated deflection fan: one ray per voltage, plus tick
/// marks every resolvable-spot angle `delta_theta` (external, radians).
pub fn render_fan(reports: &[SimReport], delta_theta: f64) -> String {
    let plot_w = CANVAS_W - 2.0 * MARGIN;
    let y_mid = CANVAS_H / 2.0;
    let theta_limit = reports
        .iter()
        .map(|r| r.theta_ext.abs())
        .fold(2.0 * delta_theta.abs(), f64::max)
        .max(1e-6);
    let px_per_rad = (y_mid - MARGIN) / theta_limit;

    let mut out = String::new();
    svg_open(&mut out, 0.0, 0.0);
    out.push_str(&format!(
        "<line class=\"axis\" x1=\"{MARGIN:.2}\" y1=\"{y_mid:.2}\" x2=\"{:.2}\" y2=\"{y_mid:.2}\"/>\n",
        MARGIN + plot_w
    ));
    if delta_theta > 0.0 {
        let k_max = (theta_limit / delta_theta).floor() as i64;
        for k in -k_max..=k_max {
            let y = y_mid - k as f64 * delta_theta * px_per_rad;
            out.push_str(&format!(
                "<line class=\"tick\" data-spot=\"{k}\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\"/>\n",
                MARGIN + plot_w - 8.0,
                MARGIN + plot_w
            ));
        }
    }
    for r in reports {
        let y = y_mid - r.theta_ext * px_per_rad;
        out.push_str(&format!(
            "<line class=\"ray\" data-voltage=\"{:.16e}\" data-theta-ext-mrad=\"{:.6}\" \
             x1=\"{MARGIN:.2}\" y1=\"{y_mid:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\"/>\n",
            r.voltage,
            r.theta_ext * MRAD_PER_RAD,
            MARGIN + plot_w
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Tallies extracted while scanning an SVG document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SvgStats {
    pub polygons: usize,
    pub polylines: usize,
    pub lines: usize,
    pub rays: usize,
    pub data_voltages: Vec<f64>,
}

fn attr_value<'t>(tag: &'t str, key: &str) -> Option<&'t str> {
    let pat = format!("{key}=\"");
    let start = tag.find(&pat)? + pat.len();
    let rest = &tag[start..];
    let end = rest.find('"')?;
    Some(&rest[..end])
}

/// Minimal structural scan of an SVG document. Never panics; rejects
/// malformed markup with a parse error. Used by tests and the fuzzer to
/// check that rendered files stay machine-readable.
pub fn scan_svg(text: &str) -> Result<SvgStats> {
    let mut stats = SvgStats::default();
    let mut rest = text;
    let mut depth = 0usize;
    let mut seen_svg = false;
    while let Some(lt) = rest.find('<') {
        let after = &rest[lt + 1..];
        let gt = after
            .find('>')
            .ok_or_else(|| Error::parse(0, None, "unterminated tag"))?;
        let tag = &after[..gt];
        rest = &after[gt + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        let closing = tag.starts_with('/');
        let body = tag.trim_start_matches('/').trim_end_matches('/');
        let name = body.split(|c: char| c.is_whitespace()).next().unwrap_or("");
        if name.is_empty() {
            return Err(Error::parse(0, None, "empty tag"));
        }
        if closing {
            depth = depth
                .checked_sub(1)
                .ok_or_else(|| Error::parse(0, None, "unbalanced closing tag"))?;
            continue;
        }
        let self_closing = tag.ends_with('/');
        if !self_closing {
            depth += 1;
        }
        match name {
            "svg" => seen_svg = true,
            "polygon" => stats.polygons += 1,
            "polyline" => stats.polylines += 1,
            "line" => {
                stats.lines += 1;
                if let Some(v) = attr_value(body, "data-voltage") {
                    let parsed: f64 = v
                        .parse()
                        .map_err(|_| Error::parse(0, None, format!("bad data-voltage {v:?}")))?;
                    if !parsed.is_finite() {
                        return Err(Error::parse(0, None, "non-finite data-voltage"));
                    }
                    stats.rays += 1;
                    stats.data_voltages.push(parsed);
                }
            }
            _ => {}
        }
    }
    if !seen_svg {
        return Err(Error::parse(0, None, "no <svg> root element"));
    }
    if depth != 0 {
        return Err(Error::parse(0, None, "unbalanced tags"));
    }
    Ok(stats)
}
