//! Command flows behind the CLI: resolve a config into a design, optionally
//! simulate the sweep, and write the output bundle.
//!
//! File names inside the bundle are fixed: `report.json`,
//! `config_resolved.txt`, `geometry.svg`, `profile.csv`, and for simulation
//! runs `fan.csv`, `fan.svg`, and one `field_NN.pgm` per sweep voltage in
//! ascending voltage order. Identical configs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::bpm::{self, SimReport};
use crate::config::{self, RunConfig};
use crate::design::{self, DesignComparison, RectComparator, ScannerProfile};
use crate::eo::{self, DriveSpec};
use crate::error::{Error, Result};
use crate::pattern::{self, DomainPattern};
use crate::pgm;
use crate::report::{
    ComparatorBlock, FanBlock, HornBlock, InputBlock, PolingBlock, Report, ScanEntry, SpotBlock,
};
use crate::svg;
use crate::table::{self, FanRow};
use crate::units::MRAD_PER_RAD;

/// Rows recorded per field image (the z resolution of `field_NN.pgm`).
pub const FIELD_IMAGE_ROWS: usize = 64;

/// Everything one subcommand produced: the report that went into
/// `report.json` plus the path of every file written.
#[derive(Debug)]
pub struct OutputBundle {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// The design-stage artifacts shared by all subcommands.
struct Designed {
    /// Signed full index contrast at the drive voltage.
    dn: f64,
    profile: ScannerProfile,
    pattern: DomainPattern,
    comparison: Option<DesignComparison>,
}

/// Runs the design stage. The outline is always synthesized for |dn|; the
/// sign of the drive only matters once fields propagate.
fn design_pieces(config: &RunConfig, want_comparator: bool) -> Result<Designed> {
    let dn = eo::index_contrast(&config.material, &config.drive)?;
    let profile =
        design::integrate_trajectory(&config.design, dn.abs(), &config.material, &config.beam)?;
    let pattern = pattern::build_domain_pattern(&profile, config.design.n_interfaces)?;
    let comparison = if want_comparator && dn != 0.0 {
        let rect = RectComparator::for_horn(
            profile.theta_int,
            &config.material,
            &config.beam,
            profile.length(),
            dn.abs(),
        )?;
        Some(design::compare_designs(
            &profile,
            dn.abs(),
            &config.material,
            &config.beam,
            &rect,
        )?)
    } else {
        None
    };
    Ok(Designed {
        dn,
        profile,
        pattern,
        comparison,
    })
}

fn base_report(config: &RunConfig, command: &str, d: &Designed) -> Report {
    let safety = eo::poling_safety(&config.material, &config.drive);
    let delta_theta = eo::far_field_divergence(&config.beam);
    let first = d.profile.samples.first().unwrap();
    let last = d.profile.samples.last().unwrap();
    Report {
        command: command.to_owned(),
        widening_mode: config.design.widening_mode.label().to_owned(),
        inputs: InputBlock {
            n_e: config.material.n_e,
            r33_m_per_v: config.material.r33,
            e_pole_v_per_m: config.material.e_pole,
            voltage_v: config.drive.voltage,
            thickness_m: config.drive.thickness,
            lambda0_m: config.beam.lambda0,
            waist_radius_m: config.beam.waist_radius,
            length_m: config.design.length,
            n_interfaces: config.design.n_interfaces,
            gamma: config.design.gamma,
        },
        dn: d.dn,
        poling: PolingBlock {
            ratio: safety.ratio,
            pass: safety.pass,
        },
        horn: HornBlock {
            entrance_width_m: d.profile.entrance_width,
            exit_width_m: d.profile.exit_width,
            entrance_width_design_m: first.width_design,
            exit_width_design_m: last.width_design,
            theta_int_rad: d.profile.theta_int,
            theta_ext_rad: d.profile.theta_ext,
            theta_ext_mrad: d.profile.theta_ext * MRAD_PER_RAD,
        },
        spots: SpotBlock {
            delta_theta_rad: delta_theta,
            delta_theta_mrad: delta_theta * MRAD_PER_RAD,
            total: eo::resolvable_spots(d.profile.theta_ext.abs(), delta_theta),
        },
        comparator: d.comparison.map(|c| ComparatorBlock {
            rect_width_m: c.rect.width,
            rect_required_dn: c.rect.required_dn,
            voltage_ratio: c.voltage_ratio,
            sensitivity_ratio: c.sensitivity_ratio,
        }),
        scan: None,
        fan: None,
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

/// Writes the files every subcommand shares, in canonical order.
fn write_design_files(
    config: &RunConfig,
    d: &Designed,
    report: &Report,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    let rendered = crate::report::render_report(report)?;
    write_file(out_dir, "report.json", rendered.as_bytes(), &mut files)?;
    write_file(
        out_dir,
        "config_resolved.txt",
        config::emit(config).as_bytes(),
        &mut files,
    )?;
    write_file(
        out_dir,
        "geometry.svg",
        svg::render_geometry(&d.pattern).as_bytes(),
        &mut files,
    )?;
    write_file(
        out_dir,
        "profile.csv",
        table::render_profile_csv(&d.profile).as_bytes(),
        &mut files,
    )?;
    Ok(files)
}

/// `design`: synthesize the outline and pattern, report the figures of merit.
pub fn run_design(config: &RunConfig, out_dir: &Path) -> Result<OutputBundle> {
    let d = design_pieces(config, config.comparator)?;
    let report = base_report(config, "design", &d);
    let files = write_design_files(config, &d, &report, out_dir)?;
    Ok(OutputBundle { report, files })
}

/// `compare`: design plus the mandatory rectangular-scanner comparison.
pub fn run_compare(config: &RunConfig, out_dir: &Path) -> Result<OutputBundle> {
    if config.drive.voltage == 0.0 {
        return Err(Error::invalid(
            "voltage",
            "compare needs a nonzero drive voltage",
        ));
    }
    let d = design_pieces(config, true)?;
    let report = base_report(config, "compare", &d);
    let files = write_design_files(config, &d, &report, out_dir)?;
    Ok(OutputBundle { report, files })
}

/// `simulate`: design, rasterize once, propagate per sweep voltage, and
/// write the fan table, fan plot, and one intensity image per voltage.
pub fn run_simulate(config: &RunConfig, out_dir: &Path) -> Result<OutputBundle> {
    let d = design_pieces(config, config.comparator)?;

    // The window must hold the widest walls plus beam clearance on each side.
    let needed = d.profile.max_wall_width() + 4.0 * config.beam.waist_radius;
    if config.grid.x_span < needed {
        return Err(Error::WindowTooSmall {
            radius_m: needed,
            span_m: config.grid.x_span,
        });
    }

    let drives: Vec<DriveSpec> = config
        .sweep
        .iter()
        .map(|&v| DriveSpec {
            voltage: v,
            thickness: config.drive.thickness,
        })
        .collect();
    let (thickness, voltages) = bpm::scan_voltages(&config.material, &drives)?;

    let raster = bpm::rasterize_index(&d.pattern, &config.grid, 0.0)?;
    let launch = bpm::launch_field(
        &config.beam,
        &config.material,
        &config.grid,
        d.pattern.length,
    )?;

    let mut sims: Vec<SimReport> = Vec::with_capacity(voltages.len());
    let mut images: Vec<Vec<u8>> = Vec::with_capacity(voltages.len());
    for &v in &voltages {
        let run = || -> Result<(SimReport, Vec<u8>)> {
            let dn_v = eo::index_contrast(
                &config.material,
                &DriveSpec {
                    voltage: v,
                    thickness,
                },
            )?;
            let map = raster.with_dn_e(0.5 * dn_v);
            let (exit, record) = bpm::propagate_recorded(
                &launch,
                &map,
                &config.beam,
                &config.material,
                FIELD_IMAGE_ROWS,
            )?;
            let metrics = bpm::exit_metrics(&exit, &config.material, &config.beam, v)?;
            Ok((metrics, pgm::render_pgm(&record)))
        };
        let (metrics, image) = run().map_err(|e| Error::ScanFailure {
            voltage: v,
            source: Box::new(e),
        })?;
        sims.push(metrics);
        images.push(image);
    }

    let delta_theta = eo::far_field_divergence(&config.beam);
    let theta_max = sims.iter().map(|r| r.theta_ext.abs()).fold(0.0, f64::max);
    let mut report = base_report(config, "simulate", &d);
    report.scan = Some(
        sims.iter()
            .map(|r| ScanEntry {
                voltage_v: r.voltage,
                theta_int_rad: r.theta_int,
                theta_ext_rad: r.theta_ext,
                theta_ext_mrad: r.theta_ext * MRAD_PER_RAD,
                exit_radius_m: r.exit_radius,
                truncation_loss: r.truncation_loss,
                spots_total: r.spots_total,
            })
            .collect(),
    );
    report.fan = Some(FanBlock {
        theta_max_ext_rad: theta_max,
        theta_max_ext_mrad: theta_max * MRAD_PER_RAD,
        spots_total: eo::resolvable_spots(theta_max, delta_theta),
    });

    let mut files = write_design_files(config, &d, &report, out_dir)?;
    let rows: Vec<FanRow> = sims
        .iter()
        .map(|r| FanRow {
            voltage: r.voltage,
            theta_int: r.theta_int,
            theta_ext: r.theta_ext,
            loss: r.truncation_loss,
        })
        .collect();
    write_file(
        out_dir,
        "fan.csv",
        table::render_fan_csv(&rows).as_bytes(),
        &mut files,
    )?;
    write_file(
        out_dir,
        "fan.svg",
        svg::render_fan(&sims, delta_theta).as_bytes(),
        &mut files,
    )?;
    for (i, image) in images.iter().enumerate() {
        write_file(out_dir, &format!("field_{i:02}.pgm"), image, &mut files)?;
    }
    Ok(OutputBundle { report, files })
}
