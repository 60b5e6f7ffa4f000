//! 2-D scalar paraxial split-step beam propagation over a domain pattern.
//!
//! The field is an envelope: the carrier exp(i k0 n_e z) is factored out and
//! each dz step applies half-step spectral diffraction, a full-step local
//! phase k0 * dn(x,z) * dz, and another half-step diffraction, with adjacent
//! half steps merged. A raised-cosine amplitude absorber in the window
//! margins soaks up power that leaves the device; everything absorbed is
//! accounted, never silently lost.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::eo::{self, BeamSpec, DriveSpec, MaterialSpec};
use crate::error::{Error, Result};
use crate::pattern::DomainPattern;

/// Transverse window and axial step for a propagation run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridSpec {
    /// Transverse window width, meters, centered on the axis.
    pub x_span: f64,
    /// Transverse sample count; a power of two.
    pub nx: usize,
    /// Axial step, meters.
    pub dz: f64,
    /// Fraction of the window taken by the absorber on each side.
    pub absorber_fraction: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_span: 2048e-6,
            nx: 2048,
            dz: 2.5e-6,
            absorber_fraction: 0.1,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_span > 0.0) || !self.x_span.is_finite() {
            return Err(Error::invalid("x_span", "must be finite and > 0"));
        }
        if self.nx < 64 || !self.nx.is_power_of_two() {
            return Err(Error::invalid("nx", "must be a power of two >= 64"));
        }
        if !(self.dz > 0.0) || !self.dz.is_finite() {
            return Err(Error::invalid("dz", "must be finite and > 0"));
        }
        if !(0.0..0.5).contains(&self.absorber_fraction) {
            return Err(Error::invalid("absorber_fraction", "must lie in [0, 0.5)"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.x_span / self.nx as f64
    }

    /// Transverse coordinate of sample j, with x = 0 at j = nx/2.
    pub fn x_at(&self, j: usize) -> f64 {
        (j as f64 - self.nx as f64 / 2.0) * self.dx()
    }

    /// Angular spatial frequency of FFT bin j (fftfreq layout).
    pub fn kt_at(&self, j: usize) -> f64 {
        let n = self.nx as f64;
        let cycles = if j < self.nx / 2 {
            j as f64
        } else {
            j as f64 - n
        };
        2.0 * std::f64::consts::PI * cycles / (n * self.dx())
    }
}

/// Per-step, per-sample domain polarity with the half-contrast it scales.
///
/// The local index offset is polarity * dn_e: +dn_e in up domains, -dn_e in
/// down domains and in the un-inverted substrate outside the walls. The
/// polarity raster is drive-independent, so a voltage sweep rasterizes once
/// and re-drives via [`IndexMap::with_dn_e`].
#[derive(Debug, Clone)]
pub struct IndexMap {
    pub grid: GridSpec,
    /// Axial step count (rows in the polarity raster).
    pub nz: usize,
    /// Row-major [nz * nx] polarity, each entry +1 or -1.
    pub polarity: std::sync::Arc<Vec<i8>>,
    /// Half-contrast dn_e; the full interface contrast is 2 * dn_e.
    pub dn_e: f64,
}

impl IndexMap {
    /// Uniform index offset `dn` everywhere (polarity +1).
    pub fn uniform(grid: GridSpec, nz: usize, dn: f64) -> Result<Self> {
        grid.validate()?;
        if nz == 0 {
            return Err(Error::invalid("nz", "must be >= 1"));
        }
        Ok(IndexMap {
            grid,
            nz,
            polarity: std::sync::Arc::new(vec![1; nz * grid.nx]),
            dn_e: dn,
        })
    }

    /// No index perturbation at all.
    pub fn free_space(grid: GridSpec, nz: usize) -> Result<Self> {
        Self::uniform(grid, nz, 0.0)
    }

    /// Same raster under a different half-contrast.
    pub fn with_dn_e(&self, dn_e: f64) -> Self {
        IndexMap {
            polarity: self.polarity.clone(),
            dn_e,
            ..*self
        }
    }

    /// Polarity raster reflected about the axis (x -> -x), sample-exactly:
    /// j maps to (nx - j) mod nx on the periodic window.
    pub fn mirrored(&self) -> Self {
        let nx = self.grid.nx;
        let mut pol = vec![0i8; self.nz * nx];
        for i in 0..self.nz {
            let row = &self.polarity[i * nx..(i + 1) * nx];
            let out = &mut pol[i * nx..(i + 1) * nx];
            for j in 0..nx {
                out[j] = row[(nx - j) % nx];
            }
        }
        IndexMap {
            polarity: std::sync::Arc::new(pol),
            ..*self
        }
    }
}

/// Complex field samples at one axial position, plus the power bookkeeping.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub grid: GridSpec,
    pub amplitudes: Vec<Complex64>,
    /// Current axial position, meters.
    pub z: f64,
    /// Current total power, sum |u|^2 dx.
    pub power: f64,
    /// Power removed by the absorber so far.
    pub absorbed: f64,
}

impl FieldState {
    fn total_power(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes.iter().map(|u| u.norm_sqr()).sum::<f64>() * dx
    }

    /// Fraction of launched power lost to the absorber.
    pub fn truncation_loss(&self) -> f64 {
        let launched = self.power + self.absorbed;
        if launched > 0.0 {
            self.absorbed / launched
        } else {
            0.0
        }
    }
}

/// Scan metrics of one propagated field.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimReport {
    /// Drive voltage this run used, volts.
    pub voltage: f64,
    /// Internal deflection from the spectral centroid, radians.
    pub theta_int: f64,
    /// External deflection n_e * theta_int, radians.
    pub theta_ext: f64,
    /// Exit 1/e^2 intensity radius from the second moment, meters.
    pub exit_radius: f64,
    /// Fraction of launched power lost to the absorber.
    pub truncation_loss: f64,
    /// Resolvable spots of a bipolar fan reaching |theta_ext|.
    pub spots_total: u32,
}

/// Rasterizes a domain pattern onto the propagation grid.
///
/// Each sample takes the polarity of the prism containing its center
/// (half-open scanline fill, equivalent to point-in-polygon up to shared
/// boundaries); samples outside the walls take -1, the un-inverted
/// substrate. Row i is sampled at z = (i + 1/2) dz.
pub fn rasterize_index(pattern: &DomainPattern, grid: &GridSpec, dn_e: f64) -> Result<IndexMap> {
    grid.validate()?;
    let (x_lo, x_hi) = pattern.x_extent();
    let half_span = 0.5 * grid.x_span;
    if x_lo < -half_span || x_hi > half_span {
        return Err(Error::PatternOutsideWindow {
            wall_m: x_lo.abs().max(x_hi.abs()),
            half_span_m: half_span,
        });
    }
    for (i, prism) in pattern.prisms.iter().enumerate() {
        if prism.polarity != 1 && prism.polarity != -1 {
            return Err(Error::invalid(
                "polarity",
                format!(
                    "prism {i} has polarity {}, expected +1 or -1",
                    prism.polarity
                ),
            ));
        }
    }
    let nz = (pattern.length / grid.dz).round() as usize;
    if nz == 0 {
        return Err(Error::invalid(
            "dz",
            "axial step exceeds the pattern length",
        ));
    }

    let nx = grid.nx;
    let dx = grid.dx();
    let half_n = nx as f64 / 2.0;
    // Prism z extents let each row skip everything it cannot intersect.
    let extents: Vec<(f64, f64)> = pattern
        .prisms
        .iter()
        .map(|p| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in &p.vertices {
                lo = lo.min(v[0]);
                hi = hi.max(v[0]);
            }
            (lo, hi)
        })
        .collect();

    let mut polarity = vec![-1i8; nz * nx];
    let mut crossings: Vec<f64> = Vec::new();
    for i in 0..nz {
        let zc = (i as f64 + 0.5) * grid.dz;
        let row = &mut polarity[i * nx..(i + 1) * nx];
        for (prism, &(z_lo, z_hi)) in pattern.prisms.iter().zip(&extents) {
            if zc < z_lo || zc > z_hi {
                continue;
            }
            crossings.clear();
            let verts = &prism.vertices;
            let n = verts.len();
            for e in 0..n {
                let a = verts[e];
                let b = verts[(e + 1) % n];
                if (a[0] > zc) != (b[0] > zc) {
                    crossings.push(a[1] + (zc - a[0]) * (b[1] - a[1]) / (b[0] - a[0]));
                }
            }
            crossings.sort_by(f64::total_cmp);
            for pair in crossings.chunks_exact(2) {
                let j0 = (pair[0] / dx + half_n).ceil().max(0.0) as usize;
                let j1 = (pair[1] / dx + half_n).ceil().min(nx as f64) as usize;
                row[j0.min(nx)..j1].fill(prism.polarity);
            }
        }
    }
    Ok(IndexMap {
        grid: *grid,
        nz,
        polarity: std::sync::Arc::new(polarity),
        dn_e,
    })
}

/// Gaussian launch field whose free propagation over `length` in index n_e
/// focuses the waist at the exit plane: 1/e^2 radius omega(0) and converging
/// parabolic phase with radius R0 = L + z_R^2/L. Power normalized to 1.
pub fn launch_field(
    beam: &BeamSpec,
    material: &MaterialSpec,
    grid: &GridSpec,
    length: f64,
) -> Result<FieldState> {
    grid.validate()?;
    beam.validate()?;
    material.validate()?;
    let w_in = eo::gaussian_radius(beam, material, 0.0, length);
    if w_in > 0.25 * grid.x_span {
        return Err(Error::WindowTooSmall {
            radius_m: w_in,
            span_m: grid.x_span,
        });
    }
    let z_r = beam.rayleigh_range(material);
    let r0 = length + z_r * z_r / length;
    let k = 2.0 * std::f64::consts::PI / beam.lambda0 * material.n_e;
    let mut amplitudes = Vec::with_capacity(grid.nx);
    for j in 0..grid.nx {
        let x = grid.x_at(j);
        let mag = (-x * x / (w_in * w_in)).exp();
        let phase = -k * x * x / (2.0 * r0);
        amplitudes.push(Complex64::from_polar(mag, phase));
    }
    let dx = grid.dx();
    let norm = (amplitudes.iter().map(|u| u.norm_sqr()).sum::<f64>() * dx).sqrt();
    for u in &mut amplitudes {
        *u /= norm;
    }
    Ok(FieldState {
        grid: *grid,
        amplitudes,
        z: 0.0,
        power: 1.0,
        absorbed: 0.0,
    })
}

/// Per-z intensity snapshots collected during a recorded propagation.
#[derive(Debug, Clone)]
pub struct FieldRecord {
    pub nx: usize,
    /// Row-major intensities |u|^2, one row per recorded z.
    pub rows: Vec<f64>,
    /// Axial position of each recorded row, meters.
    pub z_rows: Vec<f64>,
}

struct Recorder {
    stride: usize,
    record: FieldRecord,
}

impl Recorder {
    fn new(nx: usize, nsteps: usize, target_rows: usize) -> Self {
        let stride = nsteps.div_ceil(target_rows.max(2) - 1).max(1);
        Recorder {
            stride,
            record: FieldRecord {
                nx,
                rows: Vec::new(),
                z_rows: Vec::new(),
            },
        }
    }

    fn push(&mut self, amplitudes: &[Complex64], z: f64) {
        self.record
            .rows
            .extend(amplitudes.iter().map(|u| u.norm_sqr()));
        self.record.z_rows.push(z);
    }
}

/// Full split-step propagation over every row of the index map.
pub fn propagate(
    field: &FieldState,
    map: &IndexMap,
    beam: &BeamSpec,
    material: &MaterialSpec,
) -> Result<FieldState> {
    run_split_step(field, map, beam, material, None)
}

/// Like [`propagate`], also returning about `target_rows` intensity
/// snapshots (launch and exit rows always included).
pub fn propagate_recorded(
    field: &FieldState,
    map: &IndexMap,
    beam: &BeamSpec,
    material: &MaterialSpec,
    target_rows: usize,
) -> Result<(FieldState, FieldRecord)> {
    let mut rec = Recorder::new(map.grid.nx, map.nz, target_rows);
    let out = run_split_step(field, map, beam, material, Some(&mut rec))?;
    Ok((out, rec.record))
}

fn run_split_step(
    field: &FieldState,
    map: &IndexMap,
    beam: &BeamSpec,
    material: &MaterialSpec,
    mut recorder: Option<&mut Recorder>,
) -> Result<FieldState> {
    if field.grid != map.grid {
        return Err(Error::GridMismatch {
            field_nx: field.grid.nx,
            field_span_m: field.grid.x_span,
            map_nx: map.grid.nx,
            map_span_m: map.grid.x_span,
        });
    }
    let grid = map.grid;
    let nx = grid.nx;
    let dz = grid.dz;
    let dx = grid.dx();
    let nsteps = map.nz;
    let k0 = 2.0 * std::f64::consts::PI / beam.lambda0;
    let k = k0 * material.n_e;

    // Spectral multipliers carry the 1/nx of the unnormalized inverse FFT.
    let scale = 1.0 / nx as f64;
    let mut half = Vec::with_capacity(nx);
    let mut full = Vec::with_capacity(nx);
    for j in 0..nx {
        let kt = grid.kt_at(j);
        let arg = -kt * kt * dz / (2.0 * k);
        half.push(Complex64::from_polar(scale, 0.5 * arg));
        full.push(Complex64::from_polar(scale, arg));
    }

    // Phase screens for the two polarities.
    let e_plus = Complex64::from_polar(1.0, k0 * map.dn_e * dz);
    let e_minus = e_plus.conj();

    // Raised-cosine amplitude taper over the absorber cells of each margin.
    let nb = (grid.absorber_fraction * nx as f64).floor() as usize;
    let absorber: Option<Vec<f64>> = if nb >= 1 {
        let mut a = vec![1.0f64; nx];
        for j in 0..nb {
            let s = (nb - j) as f64 / nb as f64;
            let taper = 0.5 * (1.0 + (std::f64::consts::PI * s).cos());
            a[j] = taper;
            a[nx - 1 - j] = taper;
        }
        Some(a)
    } else {
        None
    };

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nx);
    let inv = planner.plan_fft_inverse(nx);
    let mut scratch = vec![
        Complex64::default();
        fwd.get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len())
    ];

    let mut u = field.amplitudes.clone();
    let mut power = field.power;
    let mut absorbed = field.absorbed;

    if let Some(rec) = recorder.as_deref_mut() {
        rec.push(&u, field.z);
    }

    let spectral = |u: &mut Vec<Complex64>, mul: &[Complex64], scratch: &mut Vec<Complex64>| {
        fwd.process_with_scratch(u, scratch);
        for (v, m) in u.iter_mut().zip(mul) {
            *v *= m;
        }
        inv.process_with_scratch(u, scratch);
    };

    spectral(&mut u, &half, &mut scratch);
    for step in 0..nsteps {
        let row = &map.polarity[step * nx..(step + 1) * nx];
        for (v, &p) in u.iter_mut().zip(row) {
            *v *= if p >= 0 { e_plus } else { e_minus };
        }
        let last = step + 1 == nsteps;
        spectral(&mut u, if last { &half } else { &full }, &mut scratch);
        if let Some(a) = &absorber {
            let before: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
            for (v, &amp) in u.iter_mut().zip(a) {
                *v *= amp;
            }
            let after: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
            absorbed += before - after;
            power = after;
        } else {
            power = u.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        }
        let z = field.z + (step + 1) as f64 * dz;
        if !power.is_finite() {
            return Err(Error::NumericalBlowup { step, z_m: z });
        }
        if let Some(rec) = recorder.as_deref_mut() {
            if (step + 1) % rec.stride == 0 || last {
                rec.push(&u, z);
            }
        }
    }

    Ok(FieldState {
        grid,
        amplitudes: u,
        z: field.z + nsteps as f64 * dz,
        power,
        absorbed,
    })
}

/// Deflection, exit size, and spot count of a propagated field.
pub fn exit_metrics(
    field: &FieldState,
    material: &MaterialSpec,
    beam: &BeamSpec,
    voltage: f64,
) -> Result<SimReport> {
    let power = field.total_power();
    if power < 1e-6 {
        return Err(Error::MetricsUndefined { power });
    }
    let grid = &field.grid;
    let nx = grid.nx;
    let k0 = 2.0 * std::f64::consts::PI / beam.lambda0;

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nx);
    let mut spectrum = field.amplitudes.clone();
    let mut scratch = vec![Complex64::default(); fwd.get_inplace_scratch_len()];
    fwd.process_with_scratch(&mut spectrum, &mut scratch);
    let mut s_sum = 0.0;
    let mut kt_sum = 0.0;
    for (j, v) in spectrum.iter().enumerate() {
        let s = v.norm_sqr();
        s_sum += s;
        kt_sum += grid.kt_at(j) * s;
    }
    let theta_int = kt_sum / s_sum / (k0 * material.n_e);

    let mut i_sum = 0.0;
    let mut x_sum = 0.0;
    for (j, v) in field.amplitudes.iter().enumerate() {
        let i = v.norm_sqr();
        i_sum += i;
        x_sum += grid.x_at(j) * i;
    }
    let x_mean = x_sum / i_sum;
    let mut var = 0.0;
    for (j, v) in field.amplitudes.iter().enumerate() {
        let d = grid.x_at(j) - x_mean;
        var += d * d * v.norm_sqr();
    }
    var /= i_sum;

    let theta_ext = eo::snell_magnify(theta_int, material);
    Ok(SimReport {
        voltage,
        theta_int,
        theta_ext,
        exit_radius: 2.0 * var.sqrt(),
        truncation_loss: field.truncation_loss(),
        spots_total: eo::resolvable_spots(theta_ext.abs(), eo::far_field_divergence(beam)),
    })
}

/// Validates a sweep's drives as a unit: at least one entry, one shared
/// substrate thickness, and every voltage poling-safe. Returns the shared
/// thickness and the normalized voltage list (sorted, deduplicated, 0 V
/// inserted) so all scan paths agree on run order.
pub fn scan_voltages(material: &MaterialSpec, drives: &[DriveSpec]) -> Result<(f64, Vec<f64>)> {
    if drives.is_empty() {
        return Err(Error::invalid("drives", "sweep needs at least one voltage"));
    }
    let thickness = drives[0].thickness;
    for d in drives {
        d.validate()?;
        if d.thickness != thickness {
            return Err(Error::invalid(
                "thickness",
                "all sweep drives must share one substrate thickness",
            ));
        }
        let safety = eo::poling_safety(material, d);
        if !safety.pass {
            return Err(Error::ScanFailure {
                voltage: d.voltage,
                source: Box::new(Error::PolingUnsafe {
                    ratio: safety.ratio,
                    allowed: material.safety_fraction,
                }),
            });
        }
    }
    let mut voltages: Vec<f64> = drives.iter().map(|d| d.voltage).collect();
    voltages.sort_by(f64::total_cmp);
    voltages.dedup();
    if !voltages.contains(&0.0) {
        let pos = voltages.partition_point(|&v| v < 0.0);
        voltages.insert(pos, 0.0);
    }
    Ok((thickness, voltages))
}

/// One propagation per drive voltage over a shared pattern raster.
///
/// Voltages are sorted, deduplicated, and 0 V is always included. Every
/// drive must pass the poling-safety check before any propagation starts.
pub fn simulate_scan(
    pattern: &DomainPattern,
    material: &MaterialSpec,
    beam: &BeamSpec,
    drives: &[DriveSpec],
    grid: &GridSpec,
) -> Result<Vec<SimReport>> {
    let (thickness, voltages) = scan_voltages(material, drives)?;
    let raster = rasterize_index(pattern, grid, 0.0)?;
    let launch = launch_field(beam, material, grid, pattern.length)?;
    let mut reports = Vec::with_capacity(voltages.len());
    for &v in &voltages {
        let run = || -> Result<SimReport> {
            let dn = eo::index_contrast(
                material,
                &DriveSpec {
                    voltage: v,
                    thickness,
                },
            )?;
            let map = raster.with_dn_e(0.5 * dn);
            let exit = propagate(&launch, &map, beam, material)?;
            exit_metrics(&exit, material, beam, v)
        };
        reports.push(run().map_err(|e| Error::ScanFailure {
            voltage: v,
            source: Box::new(e),
        })?);
    }
    Ok(reports)
}
