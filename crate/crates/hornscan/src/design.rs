//! Horn outline synthesis and the rectangular-scanner comparator.
//!
//! The scanner outline follows the deflected beam: the trajectory obeys
//! x'' = (dn/n_e)/W(z) with local width W(z) = 2[x(z) + omega(z)], starting
//! on axis with zero slope. The walls are then widened by a clearance factor
//! gamma. Two conventions are supported for whether that widening feeds back
//! into the trajectory equation; see [`WideningMode`].

use crate::eo::{self, BeamSpec, MaterialSpec};
use crate::error::{Error, Result};

/// Whether the widening factor gamma feeds back into the trajectory ODE.
///
/// `Design` integrates with the unwidened width 2(x + omega) and only the
/// drawn walls are scaled by gamma. `SelfConsistent` integrates with the
/// widened width gamma*2(x + omega), so the predicted deflection matches a
/// device whose domains span the full widened aperture. The two modes
/// bracket the published deflection; `SelfConsistent` is the default because
/// the propagation model sees the widened domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WideningMode {
    Design,
    #[default]
    #[serde(rename = "selfconsistent")]
    SelfConsistent,
}

impl WideningMode {
    pub fn label(self) -> &'static str {
        match self {
            WideningMode::Design => "design",
            WideningMode::SelfConsistent => "selfconsistent",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "design" => Some(WideningMode::Design),
            "selfconsistent" => Some(WideningMode::SelfConsistent),
            _ => None,
        }
    }
}

/// Geometry and discretization knobs for the horn synthesis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DesignParams {
    /// Device length L, meters.
    pub length: f64,
    /// Number of domain interfaces N.
    pub n_interfaces: u32,
    /// Wall widening factor gamma (>= 1).
    pub gamma: f64,
    /// Fixed RK4 step count for the trajectory integration.
    pub ode_steps: u32,
    pub widening_mode: WideningMode,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            length: 10e-3,
            n_interfaces: 20,
            gamma: 1.3,
            ode_steps: 10_000,
            widening_mode: WideningMode::default(),
        }
    }
}

impl DesignParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::invalid("length", "must be finite and > 0"));
        }
        if self.n_interfaces < 1 {
            return Err(Error::invalid("n_interfaces", "must be >= 1"));
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite and >= 1"));
        }
        if self.ode_steps < 100 {
            return Err(Error::invalid("ode_steps", "must be >= 100"));
        }
        Ok(())
    }
}

/// One z sample of the synthesized outline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub z: f64,
    /// Beam center offset x(z), meters.
    pub x: f64,
    /// Trajectory slope dx/dz.
    pub slope: f64,
    /// Gaussian 1/e^2 radius omega(z), meters.
    pub omega: f64,
    /// Unwidened width 2[x(z) + omega(z)], meters.
    pub width_design: f64,
    /// Widened wall-to-wall width gamma * width_design, meters.
    pub width_walls: f64,
}

/// Sampled horn outline with the deflection it was designed for.
///
/// Samples are uniform in z from 0 to L (ode_steps + 1 of them). The walls
/// sit symmetrically at +/- width_walls/2 about the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ScannerProfile {
    pub samples: Vec<ProfileSample>,
    /// Wall-to-wall width at z = 0, meters.
    pub entrance_width: f64,
    /// Wall-to-wall width at z = L, meters.
    pub exit_width: f64,
    /// Internal deflection x'(L), radians.
    pub theta_int: f64,
    /// External deflection n_e * x'(L), radians.
    pub theta_ext: f64,
    pub gamma: f64,
    pub widening_mode: WideningMode,
}

impl ScannerProfile {
    pub fn length(&self) -> f64 {
        self.samples.last().map(|s| s.z).unwrap_or(0.0)
    }

    /// Wall half-width at z by linear interpolation between samples.
    pub fn wall_half_width(&self, z: f64) -> f64 {
        let n = self.samples.len() - 1;
        let length = self.length();
        let t = (z / length).clamp(0.0, 1.0) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let frac = t - i as f64;
        let w0 = self.samples[i].width_walls;
        let w1 = self.samples[i + 1].width_walls;
        0.5 * (w0 + frac * (w1 - w0))
    }

    pub fn max_wall_width(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.width_walls)
            .fold(0.0, f64::max)
    }

    /// Trapezoidal integral of width_walls dz: the area enclosed by the walls.
    pub fn wall_area(&self) -> f64 {
        let mut area = 0.0;
        for pair in self.samples.windows(2) {
            area += 0.5 * (pair[0].width_walls + pair[1].width_walls) * (pair[1].z - pair[0].z);
        }
        area
    }
}

/// RK4 on x'' = (dn/n_e)/W(z, x) at `n` fixed steps, returning per-step
/// (x, slope) including the initial condition.
fn rk4_trajectory<F>(dn: f64, n_e: f64, length: f64, n: u32, width_at: &F) -> Vec<(f64, f64)>
where
    F: Fn(f64, f64) -> f64,
{
    let h = length / n as f64;
    let acc = |z: f64, x: f64| (dn / n_e) / width_at(z, x);
    let mut out = Vec::with_capacity(n as usize + 1);
    let (mut x, mut v) = (0.0f64, 0.0f64);
    out.push((x, v));
    for i in 0..n {
        let z = i as f64 * h;
        let k1x = v;
        let k1v = acc(z, x);
        let k2x = v + 0.5 * h * k1v;
        let k2v = acc(z + 0.5 * h, x + 0.5 * h * k1x);
        let k3x = v + 0.5 * h * k2v;
        let k3v = acc(z + 0.5 * h, x + 0.5 * h * k2x);
        let k4x = v + h * k3v;
        let k4v = acc(z + h, x + h * k3x);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.push((x, v));
    }
    out
}

/// Integrates with `width_at` and checks the step-halving sentinel: the run
/// is rejected if x(L) moves by more than 1e-3 relative when the step halves.
pub(crate) fn integrate_checked<F>(
    dn: f64,
    n_e: f64,
    length: f64,
    ode_steps: u32,
    width_at: &F,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> f64,
{
    let coarse = rk4_trajectory(dn, n_e, length, ode_steps, width_at);
    let fine = rk4_trajectory(dn, n_e, length, 2 * ode_steps, width_at);
    let xc = coarse.last().unwrap().0;
    let xf = fine.last().unwrap().0;
    let rel = (xc - xf).abs() / xf.abs().max(f64::EPSILON);
    if !xc.is_finite() || !xf.is_finite() || rel > 1e-3 {
        return Err(Error::NonConvergence {
            rel_change: rel,
            limit: 1e-3,
        });
    }
    Ok(coarse)
}

/// Synthesizes the horn profile for an index contrast `dn` (>= 0).
///
/// The trajectory equation uses W = 2(x + omega) in `Design` mode and
/// gamma * 2(x + omega) in `SelfConsistent` mode; the reported walls are
/// gamma times the design width in both.
pub fn integrate_trajectory(
    params: &DesignParams,
    dn: f64,
    material: &MaterialSpec,
    beam: &BeamSpec,
) -> Result<ScannerProfile> {
    params.validate()?;
    material.validate()?;
    beam.validate()?;
    if !(dn >= 0.0) || !dn.is_finite() {
        return Err(Error::invalid("dn", "must be finite and >= 0"));
    }

    let length = params.length;
    let g = match params.widening_mode {
        WideningMode::Design => 1.0,
        WideningMode::SelfConsistent => params.gamma,
    };
    let width_at = |z: f64, x: f64| g * 2.0 * (x + eo::gaussian_radius(beam, material, z, length));
    let states = integrate_checked(dn, material.n_e, length, params.ode_steps, &width_at)?;

    let h = length / params.ode_steps as f64;
    let samples: Vec<ProfileSample> = states
        .iter()
        .enumerate()
        .map(|(i, &(x, slope))| {
            let z = i as f64 * h;
            let omega = eo::gaussian_radius(beam, material, z, length);
            let width_design = 2.0 * (x + omega);
            ProfileSample {
                z,
                x,
                slope,
                omega,
                width_design,
                width_walls: params.gamma * width_design,
            }
        })
        .collect();

    let theta_int = samples.last().unwrap().slope;
    Ok(ScannerProfile {
        entrance_width: samples.first().unwrap().width_walls,
        exit_width: samples.last().unwrap().width_walls,
        theta_int,
        theta_ext: eo::snell_magnify(theta_int, material),
        gamma: params.gamma,
        widening_mode: params.widening_mode,
        samples,
    })
}

/// Integrates the trajectory with a frozen channel width W(z) = `width`,
/// ignoring the widening mode (the override is the whole point). Reproduces
/// the closed form x(L) = (dn/n_e) L^2 / (2W) of the constant-width scanner.
pub fn integrate_fixed_width(
    params: &DesignParams,
    dn: f64,
    material: &MaterialSpec,
    width: f64,
) -> Result<ScannerProfile> {
    params.validate()?;
    material.validate()?;
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::invalid("width", "must be finite and > 0"));
    }
    if !(dn >= 0.0) || !dn.is_finite() {
        return Err(Error::invalid("dn", "must be finite and >= 0"));
    }
    let length = params.length;
    let width_at = |_: f64, _: f64| width;
    let states = integrate_checked(dn, material.n_e, length, params.ode_steps, &width_at)?;
    let h = length / params.ode_steps as f64;
    let samples: Vec<ProfileSample> = states
        .iter()
        .enumerate()
        .map(|(i, &(x, slope))| ProfileSample {
            z: i as f64 * h,
            x,
            slope,
            omega: 0.5 * width - x,
            width_design: width,
            width_walls: params.gamma * width,
        })
        .collect();
    let theta_int = samples.last().unwrap().slope;
    Ok(ScannerProfile {
        entrance_width: params.gamma * width,
        exit_width: params.gamma * width,
        theta_int,
        theta_ext: eo::snell_magnify(theta_int, material),
        gamma: params.gamma,
        widening_mode: params.widening_mode,
        samples,
    })
}

/// Rescales the walls to gamma times the design width. The trajectory and
/// design width are untouched.
pub fn widen_profile(profile: &ScannerProfile, gamma: f64) -> Result<ScannerProfile> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", "must be finite and >= 1"));
    }
    let mut out = profile.clone();
    for s in &mut out.samples {
        s.width_walls = gamma * s.width_design;
    }
    out.gamma = gamma;
    out.entrance_width = out.samples.first().unwrap().width_walls;
    out.exit_width = out.samples.last().unwrap().width_walls;
    Ok(out)
}

/// Width a rectangular scanner needs so a beam pivoting about its center
/// clears the aperture at full deflection: W = theta_max * L + 2 * w0.
pub fn rect_required_width(theta_max_int: f64, length: f64, beam: &BeamSpec) -> f64 {
    assert!(theta_max_int >= 0.0, "theta_max_int must be nonnegative");
    theta_max_int * length + 2.0 * beam.waist_radius
}

/// Index contrast a rectangular scanner of width W needs for an internal
/// deflection theta_int over length L: dn = theta_int * n_e * W / L.
pub fn rect_required_index(
    theta_int: f64,
    material: &MaterialSpec,
    length: f64,
    width: f64,
) -> f64 {
    assert!(
        width > 0.0 && length > 0.0,
        "width and length must be positive"
    );
    theta_int * material.n_e * width / length
}

/// Rectangular scanner sized for the same task as a horn design.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RectComparator {
    /// Required aperture width, meters.
    pub width: f64,
    /// Index contrast needed to reach the shared deflection.
    pub required_dn: f64,
    /// required_dn / horn dn: the drive-voltage penalty of the rectangle.
    pub voltage_ratio: f64,
}

impl RectComparator {
    /// Sizes the rectangle for the horn's maximum internal angle and drive.
    pub fn for_horn(
        theta_max_int: f64,
        material: &MaterialSpec,
        beam: &BeamSpec,
        length: f64,
        dn_horn: f64,
    ) -> Result<Self> {
        if !(dn_horn > 0.0) || !dn_horn.is_finite() {
            return Err(Error::invalid("dn_horn", "must be finite and > 0"));
        }
        let width = rect_required_width(theta_max_int, length, beam);
        let required_dn = rect_required_index(theta_max_int, material, length, width);
        Ok(RectComparator {
            width,
            required_dn,
            voltage_ratio: required_dn / dn_horn,
        })
    }
}

/// Side-by-side figures for a horn design and its rectangular comparator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DesignComparison {
    pub theta_int: f64,
    pub theta_ext: f64,
    pub horn_dn: f64,
    pub horn_entrance_width: f64,
    pub horn_exit_width: f64,
    pub rect: RectComparator,
    /// Voltage the rectangle needs relative to the horn for the same angle.
    pub voltage_ratio: f64,
    /// Deflection per volt of the horn relative to the rectangle. For
    /// matched geometry this equals voltage_ratio; both views are reported.
    pub sensitivity_ratio: f64,
}

/// Cross-checks a comparator against the horn it claims to match and packs
/// the comparison report. The rectangle must have been sized for the horn's
/// angle and beam or the comparison is refused.
pub fn compare_designs(
    horn: &ScannerProfile,
    dn_horn: f64,
    material: &MaterialSpec,
    beam: &BeamSpec,
    rect: &RectComparator,
) -> Result<DesignComparison> {
    let expected =
        RectComparator::for_horn(horn.theta_int, material, beam, horn.length(), dn_horn)?;
    let width_ok = (rect.width - expected.width).abs() <= 1e-9 * expected.width;
    let dn_ok = (rect.required_dn - expected.required_dn).abs() <= 1e-9 * expected.required_dn;
    if !width_ok || !dn_ok {
        return Err(Error::ComparisonMismatch(format!(
            "comparator was not sized for this horn: width {:.6e} vs expected {:.6e} m, \
             dn {:.6e} vs expected {:.6e}",
            rect.width, expected.width, rect.required_dn, expected.required_dn
        )));
    }
    let voltage_ratio = rect.required_dn / dn_horn;
    Ok(DesignComparison {
        theta_int: horn.theta_int,
        theta_ext: horn.theta_ext,
        horn_dn: dn_horn,
        horn_entrance_width: horn.entrance_width,
        horn_exit_width: horn.exit_width,
        rect: *rect,
        voltage_ratio,
        sensitivity_ratio: voltage_ratio,
    })
}
