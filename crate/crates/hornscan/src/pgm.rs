//! Binary PGM (P5) intensity maps of the propagated field.
//!
//! Rendering is canonical: `P5\n{width} {height}\n255\n` followed by
//! width*height intensity bytes, peak-normalized, z increasing downward.
//! Parsing follows the netpbm grammar (comments and flexible whitespace in
//! the header) but enforces hard size limits so arbitrary input cannot
//! allocate unbounded memory.

use crate::bpm::FieldRecord;
use crate::error::{Error, Result};

/// Refuse to parse images larger than this many pixels.
pub const MAX_PIXELS: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u8>,
}

/// Renders a recorded propagation as a peak-normalized 8-bit P5 image.
/// Row 0 is the launch plane; the last row is the exit plane.
pub fn render_pgm(record: &FieldRecord) -> Vec<u8> {
    let width = record.nx;
    let height = record.z_rows.len();
    debug_assert_eq!(record.rows.len(), width * height);
    let peak = record.rows.iter().copied().fold(0.0f64, f64::max);
    let scale = if peak > 0.0 { 255.0 / peak } else { 0.0 };
    let mut out = Vec::with_capacity(32 + width * height);
    out.extend_from_slice(format!("P5\n{width} {height}\n255\n").as_bytes());
    out.extend(
        record
            .rows
            .iter()
            .map(|&v| (v * scale).round().clamp(0.0, 255.0) as u8),
    );
    out
}

struct Tokens<'b> {
    bytes: &'b [u8],
    pos: usize,
}

impl<'b> Tokens<'b> {
    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_filler();
        let start = self.pos;
        let mut value: usize = 0;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            let digit = (self.bytes[self.pos] - b'0') as usize;
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(digit))
                .ok_or_else(|| Error::parse(0, None, format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::parse(0, None, format!("expected {what}")));
        }
        Ok(value)
    }
}

/// Parses a binary PGM. Accepts header comments and any netpbm whitespace;
/// rejects truncated data, trailing bytes, and oversized dimensions.
pub fn parse_pgm(bytes: &[u8]) -> Result<PgmImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::parse(0, None, "not a P5 image"));
    }
    let mut t = Tokens { bytes, pos: 2 };
    let width = t.number("width")?;
    let height = t.number("height")?;
    let maxval = t.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::parse(0, None, "zero image dimension"));
    }
    if !(1..=255).contains(&maxval) {
        return Err(Error::parse(
            0,
            None,
            format!("unsupported maxval {maxval}"),
        ));
    }
    let npix = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or_else(|| Error::parse(0, None, "image too large"))?;
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(t.pos) {
        Some(b' ' | b'\t' | b'\r' | b'\n') => t.pos += 1,
        _ => return Err(Error::parse(0, None, "missing raster separator")),
    }
    let data = &bytes[t.pos..];
    if data.len() < npix {
        return Err(Error::parse(0, None, "truncated raster"));
    }
    if data.len() > npix {
        return Err(Error::parse(0, None, "trailing bytes after raster"));
    }
    Ok(PgmImage {
        width,
        height,
        maxval: maxval as u16,
        pixels: data.to_vec(),
    })
}
