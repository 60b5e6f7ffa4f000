//! Crate-wide error type and process exit-code mapping.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type was constructed with values that violate its invariants.
    #[error("invalid {what}: {why}")]
    InvalidSpec { what: &'static str, why: String },

    /// Drive field exceeds the allowed fraction of the poling field.
    #[error(
        "drive field is {ratio:.3} of the poling field (allowed fraction {allowed:.3}); \
         refusing to operate"
    )]
    PolingUnsafe { ratio: f64, allowed: f64 },

    /// Halving the integrator step moved the endpoint by more than the
    /// convergence threshold.
    #[error("trajectory integration did not converge: halving the step changed x(L) by {rel_change:.3e} (limit {limit:.1e})")]
    NonConvergence { rel_change: f64, limit: f64 },

    /// A prism in the domain pattern collapsed to zero area.
    #[error("degenerate prism {index}: area {area:.3e} m^2")]
    DegeneratePrism { index: usize, area: f64 },

    /// Domain pattern walls extend past the simulation window.
    #[error(
        "pattern walls reach |x| = {wall_m:.3e} m but the window half-span is {half_span_m:.3e} m"
    )]
    PatternOutsideWindow { wall_m: f64, half_span_m: f64 },

    /// The transverse window is too small for the beam or device.
    #[error("window too small: needs clear extent {radius_m:.3e} m but x_span is {span_m:.3e} m")]
    WindowTooSmall { radius_m: f64, span_m: f64 },

    /// Field and index map were built on different grids.
    #[error("field grid ({field_nx} samples, {field_span_m:.3e} m) does not match map grid ({map_nx} samples, {map_span_m:.3e} m)")]
    GridMismatch {
        field_nx: usize,
        field_span_m: f64,
        map_nx: usize,
        map_span_m: f64,
    },

    /// Non-finite field values appeared during propagation.
    #[error("non-finite field values at propagation step {step} (z = {z_m:.6e} m)")]
    NumericalBlowup { step: usize, z_m: f64 },

    /// Too little power left in the field to form meaningful statistics.
    #[error("field power {power:.3e} is below 1e-6 of the launched power; metrics undefined")]
    MetricsUndefined { power: f64 },

    /// Horn and rectangular comparator do not share the required parameters.
    #[error("comparison mismatch: {0}")]
    ComparisonMismatch(String),

    /// A scan failed at one of the sweep voltages.
    #[error("scan failed at {voltage} V: {source}")]
    ScanFailure {
        voltage: f64,
        #[source]
        source: Box<Error>,
    },

    /// Config or emitted-file text could not be parsed.
    #[error("parse error at line {line}{}: {msg}", key.as_ref().map(|k| format!(", key `{k}`")).unwrap_or_default())]
    Parse {
        line: usize,
        key: Option<String>,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(line: usize, key: Option<&str>, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            key: key.map(str::to_owned),
            msg: msg.into(),
        }
    }

    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidSpec {
            what,
            why: why.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for parse/validation failures, 3 for numerical
    /// failures, 1 otherwise. 0 is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InvalidSpec { .. } | Error::PolingUnsafe { .. } => 2,
            Error::NonConvergence { .. }
            | Error::NumericalBlowup { .. }
            | Error::MetricsUndefined { .. } => 3,
            Error::ScanFailure { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
