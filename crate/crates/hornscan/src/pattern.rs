//! Discretization of a horn profile into alternating-polarity prism domains.
//!
//! The axial span [0, L] is cut into N segments. Interface k is a straight
//! segment from one wall at z_k to the opposite wall at z_{k+1}, zigzagging
//! so consecutive interfaces meet on the walls. That yields N+1 prisms of
//! strictly alternating polarity whose union tiles the region between the
//! walls exactly. The first interface rises from the -x wall and even
//! prisms carry +1, so a positive drive deflects toward +x.

use crate::design::ScannerProfile;
use crate::error::{Error, Result};

/// One poled domain: a simple polygon with vertices as [z, x] pairs and the
/// sign its index offset takes under positive drive.
#[derive(Debug, Clone, PartialEq)]
pub struct Prism {
    pub vertices: Vec<[f64; 2]>,
    pub polarity: i8,
}

impl Prism {
    /// Unsigned polygon area, shoelace formula.
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices).abs()
    }

    /// Area centroid of the polygon.
    pub fn centroid(&self) -> [f64; 2] {
        polygon_centroid(&self.vertices)
    }

    pub fn contains(&self, z: f64, x: f64) -> bool {
        point_in_polygon(&self.vertices, z, x)
    }
}

/// The full domain-inversion mask: prisms plus the sampled wall polylines.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPattern {
    pub prisms: Vec<Prism>,
    /// Upper (+x) wall polyline, [z, x] samples with increasing z.
    pub wall_upper: Vec<[f64; 2]>,
    /// Lower (-x) wall polyline.
    pub wall_lower: Vec<[f64; 2]>,
    pub n_interfaces: u32,
    pub length: f64,
}

impl DomainPattern {
    /// Total prism area; equals the wall-enclosed area when valid.
    pub fn total_area(&self) -> f64 {
        self.prisms.iter().map(Prism::area).sum()
    }

    /// Index of the prism containing (z, x), if any.
    pub fn prism_containing(&self, z: f64, x: f64) -> Option<usize> {
        self.prisms.iter().position(|p| p.contains(z, x))
    }

    /// Extreme x over both wall polylines, as (min, max).
    pub fn x_extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in self.wall_upper.iter().chain(self.wall_lower.iter()) {
            lo = lo.min(p[1]);
            hi = hi.max(p[1]);
        }
        (lo, hi)
    }

    /// Copy of the pattern shifted rigidly by dx in x.
    pub fn translate_x(&self, dx: f64) -> Self {
        let shift = |pts: &[[f64; 2]]| pts.iter().map(|p| [p[0], p[1] + dx]).collect();
        DomainPattern {
            prisms: self
                .prisms
                .iter()
                .map(|p| Prism {
                    vertices: shift(&p.vertices),
                    polarity: p.polarity,
                })
                .collect(),
            wall_upper: shift(&self.wall_upper),
            wall_lower: shift(&self.wall_lower),
            n_interfaces: self.n_interfaces,
            length: self.length,
        }
    }

    /// Copy mirrored about the axis (x -> -x) with every polarity negated.
    pub fn mirror_negate(&self) -> Self {
        let flip = |pts: &[[f64; 2]]| pts.iter().map(|p| [p[0], -p[1]]).collect();
        DomainPattern {
            prisms: self
                .prisms
                .iter()
                .map(|p| Prism {
                    vertices: flip(&p.vertices),
                    polarity: -p.polarity,
                })
                .collect(),
            wall_upper: flip(&self.wall_lower),
            wall_lower: flip(&self.wall_upper),
            n_interfaces: self.n_interfaces,
            length: self.length,
        }
    }
}

/// Signed shoelace area (positive for counterclockwise winding).
pub(crate) fn polygon_area(verts: &[[f64; 2]]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

pub(crate) fn polygon_centroid(verts: &[[f64; 2]]) -> [f64; 2] {
    let n = verts.len();
    let mut cz = 0.0;
    let mut cx = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        let cross = p[0] * q[1] - q[0] * p[1];
        cz += (p[0] + q[0]) * cross;
        cx += (p[1] + q[1]) * cross;
        a += cross;
    }
    [cz / (3.0 * a), cx / (3.0 * a)]
}

/// Even-odd ray cast along +z at fixed x.
pub fn point_in_polygon(verts: &[[f64; 2]], z: f64, x: f64) -> bool {
    let n = verts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (zi, xi) = (verts[i][0], verts[i][1]);
        let (zj, xj) = (verts[j][0], verts[j][1]);
        if (xi > x) != (xj > x) {
            let z_cross = zi + (x - xi) * (zj - zi) / (xj - xi);
            if z < z_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Builds the zigzag prism tiling of a profile's wall region.
pub fn build_domain_pattern(profile: &ScannerProfile, n_interfaces: u32) -> Result<DomainPattern> {
    if n_interfaces < 1 {
        return Err(Error::invalid("n_interfaces", "must be >= 1"));
    }
    if profile.samples.len() < 2 {
        return Err(Error::invalid("profile", "needs at least two samples"));
    }
    let length = profile.length();
    let n = n_interfaces as usize;
    let zk: Vec<f64> = (0..=n).map(|k| k as f64 * length / n as f64).collect();
    let wk: Vec<f64> = zk.iter().map(|&z| profile.wall_half_width(z)).collect();

    // Wall samples strictly inside (z_from, z_to), in decreasing z, on the
    // given side. Prism boundaries return along the wall through these so
    // the union reproduces the sampled wall polyline exactly.
    let arc_back = |za: f64, zb: f64, side: f64| -> Vec<[f64; 2]> {
        profile
            .samples
            .iter()
            .rev()
            .filter(|s| s.z > za && s.z < zb)
            .map(|s| [s.z, side * 0.5 * s.width_walls])
            .collect()
    };

    let mut prisms = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut verts: Vec<[f64; 2]> = Vec::new();
        if p == 0 {
            verts.push([zk[0], -wk[0]]);
            verts.push([zk[1], wk[1]]);
            verts.extend(arc_back(zk[0], zk[1], 1.0));
            verts.push([zk[0], wk[0]]);
        } else if p == n {
            if (p - 1) % 2 == 0 {
                verts.push([zk[p - 1], -wk[p - 1]]);
                verts.push([zk[p], wk[p]]);
                verts.push([zk[p], -wk[p]]);
                verts.extend(arc_back(zk[p - 1], zk[p], -1.0));
            } else {
                verts.push([zk[p - 1], wk[p - 1]]);
                verts.push([zk[p], -wk[p]]);
                verts.push([zk[p], wk[p]]);
                verts.extend(arc_back(zk[p - 1], zk[p], 1.0));
            }
        } else if p % 2 == 1 {
            verts.push([zk[p - 1], -wk[p - 1]]);
            verts.push([zk[p], wk[p]]);
            verts.push([zk[p + 1], -wk[p + 1]]);
            verts.extend(arc_back(zk[p - 1], zk[p + 1], -1.0));
        } else {
            verts.push([zk[p - 1], wk[p - 1]]);
            verts.push([zk[p], -wk[p]]);
            verts.push([zk[p + 1], wk[p + 1]]);
            verts.extend(arc_back(zk[p - 1], zk[p + 1], 1.0));
        }
        let prism = Prism {
            vertices: verts,
            polarity: if p % 2 == 0 { 1 } else { -1 },
        };
        let area = prism.area();
        if !(area > 1e-18) {
            return Err(Error::DegeneratePrism { index: p, area });
        }
        prisms.push(prism);
    }

    let wall_upper: Vec<[f64; 2]> = profile
        .samples
        .iter()
        .map(|s| [s.z, 0.5 * s.width_walls])
        .collect();
    let wall_lower: Vec<[f64; 2]> = profile
        .samples
        .iter()
        .map(|s| [s.z, -0.5 * s.width_walls])
        .collect();
    Ok(DomainPattern {
        prisms,
        wall_upper,
        wall_lower,
        n_interfaces,
        length,
    })
}
