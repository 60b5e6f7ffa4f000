//! Design and verification toolkit for horn-shaped electrooptic scanners.
//!
//! A horn scanner steers a beam with cascaded domain-inverted prisms inside
//! a channel whose width follows the deflected beam, so the drive voltage
//! buys angle instead of aperture. This crate covers the full loop:
//!
//! * [`eo`]: material response, index contrast, beam geometry, spot counts.
//! * [`design`]: trajectory ODE, horn outline synthesis, widening, and the
//!   rectangular-scanner comparator.
//! * [`pattern`]: discretization of the outline into alternating-polarity
//!   prism domains that tile the horn exactly.
//! * [`bpm`]: 2-D paraxial split-step propagation through the rasterized
//!   pattern, exit metrics, and voltage scans.
//! * [`config`], [`report`], [`table`], [`svg`], [`pgm`]: byte-exact file
//!   formats (all documented in docs/FORMATS.md).
//! * [`run`]: the subcommand flows behind the `hornscan` binary.
//!
//! Everything is deterministic: no clocks, no RNG, no thread ordering in
//! any output path.

// Validators use `!(x > 0.0)` instead of `x <= 0.0` so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bpm;
pub mod config;
pub mod design;
pub mod eo;
pub mod error;
pub mod pattern;
pub mod pgm;
pub mod report;
pub mod run;
pub mod svg;
pub mod table;
pub mod units;

pub use bpm::{launch_field, propagate, rasterize_index, simulate_scan, GridSpec, SimReport};
pub use config::{parse_config, RunConfig};
pub use design::{
    compare_designs, integrate_trajectory, DesignParams, RectComparator, ScannerProfile,
    WideningMode,
};
pub use eo::{index_contrast, BeamSpec, DriveSpec, MaterialSpec};
pub use error::{Error, Result};
pub use pattern::{build_domain_pattern, DomainPattern};
pub use report::Report;
pub use run::{run_compare, run_design, run_simulate, OutputBundle};
