//! Electrooptic and Gaussian-beam relations for the horn scanner.
//!
//! Everything here is a pure function of the material, drive, and beam
//! specs. Angles are radians, lengths meters, fields V/m.

use crate::error::{Error, Result};

/// Crystal optical and electrooptic constants plus the poling limit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MaterialSpec {
    /// Extraordinary refractive index n_e.
    pub n_e: f64,
    /// Electrooptic coefficient r33, m/V.
    pub r33: f64,
    /// Poling field magnitude, V/m.
    pub e_pole: f64,
    /// Maximum allowed |E3|/E_pole before the drive is refused.
    pub safety_fraction: f64,
}

impl MaterialSpec {
    /// Congruent LiTaO3 at 632.8 nm.
    pub fn litao3() -> Self {
        MaterialSpec {
            n_e: 2.1807,
            r33: 30.5e-12,
            e_pole: 21e6,
            safety_fraction: 1.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_e > 1.0) || !self.n_e.is_finite() {
            return Err(Error::invalid("n_e", "must be finite and > 1"));
        }
        if !(self.r33 > 0.0) || !self.r33.is_finite() {
            return Err(Error::invalid("r33", "must be finite and > 0"));
        }
        if !(self.e_pole > 0.0) || !self.e_pole.is_finite() {
            return Err(Error::invalid("e_pole", "must be finite and > 0"));
        }
        if !(self.safety_fraction > 0.0 && self.safety_fraction <= 1.0) {
            return Err(Error::invalid("safety_fraction", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Applied voltage and the substrate thickness it drops across.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DriveSpec {
    /// Applied voltage V, volts.
    pub voltage: f64,
    /// Substrate thickness d, meters.
    pub thickness: f64,
}

impl DriveSpec {
    /// Field E3 = V/d along the polar axis, V/m.
    pub fn field(&self) -> f64 {
        self.voltage / self.thickness
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0) || !self.thickness.is_finite() {
            return Err(Error::invalid("thickness", "must be finite and > 0"));
        }
        if !self.voltage.is_finite() {
            return Err(Error::invalid("voltage", "must be finite"));
        }
        Ok(())
    }
}

/// Free-space wavelength and waist of the probe beam. The waist sits at the
/// scanner exit plane z = L.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BeamSpec {
    /// Free-space wavelength, meters.
    pub lambda0: f64,
    /// 1/e^2 intensity radius at the waist, meters.
    pub waist_radius: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0) || !self.lambda0.is_finite() {
            return Err(Error::invalid("lambda0", "must be finite and > 0"));
        }
        if !(self.waist_radius > 0.0) || !self.waist_radius.is_finite() {
            return Err(Error::invalid("waist_radius", "must be finite and > 0"));
        }
        Ok(())
    }

    /// In-crystal Rayleigh range z_R = pi n_e w0^2 / lambda0.
    pub fn rayleigh_range(&self, material: &MaterialSpec) -> f64 {
        std::f64::consts::PI * material.n_e * self.waist_radius.powi(2) / self.lambda0
    }
}

/// Full index contrast across a domain wall, 2 * (1/2) n_e^3 r33 E3.
///
/// The sign follows the sign of the voltage. Each domain deviates from n_e
/// by half this value. Refuses drives that fail [`poling_safety`].
pub fn index_contrast(material: &MaterialSpec, drive: &DriveSpec) -> Result<f64> {
    let safety = poling_safety(material, drive);
    if !safety.pass {
        return Err(Error::PolingUnsafe {
            ratio: safety.ratio,
            allowed: material.safety_fraction,
        });
    }
    Ok(material.n_e.powi(3) * material.r33 * drive.field())
}

/// External deflection for a small internal angle at the exit facet,
/// theta_ext = n_e * theta_int. Valid for |theta_int| < 0.2 rad.
pub fn snell_magnify(theta_int: f64, material: &MaterialSpec) -> f64 {
    material.n_e * theta_int
}

/// In-crystal 1/e^2 radius at position z of a beam waisted at z = L.
pub fn gaussian_radius(beam: &BeamSpec, material: &MaterialSpec, z: f64, length: f64) -> f64 {
    let spread = beam.lambda0 * (z - length)
        / (std::f64::consts::PI * material.n_e * beam.waist_radius.powi(2));
    beam.waist_radius * (1.0 + spread * spread).sqrt()
}

/// External full 1/e^2 angular diameter 2*lambda0/(pi*w0): the separation at
/// which two far-field spots count as resolved.
pub fn far_field_divergence(beam: &BeamSpec) -> f64 {
    2.0 * beam.lambda0 / (std::f64::consts::PI * beam.waist_radius)
}

/// Spot count for a bipolar fan: 2*floor(theta_max/delta_theta) + 1,
/// counting the undeflected center spot.
pub fn resolvable_spots(theta_max_one_side: f64, delta_theta: f64) -> u32 {
    assert!(theta_max_one_side >= 0.0, "theta_max must be nonnegative");
    assert!(delta_theta > 0.0, "delta_theta must be positive");
    2 * (theta_max_one_side / delta_theta).floor() as u32 + 1
}

/// Poling-safety verdict: the field ratio and whether it stays within the
/// material's allowed fraction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PolingSafety {
    /// |E3| / E_pole.
    pub ratio: f64,
    pub pass: bool,
}

/// Compares the applied field against the poling field. Failure is a status,
/// not an error; callers that must refuse unsafe drives check `pass`.
pub fn poling_safety(material: &MaterialSpec, drive: &DriveSpec) -> PolingSafety {
    let ratio = drive.field().abs() / material.e_pole;
    PolingSafety {
        ratio,
        pass: ratio <= material.safety_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_drive() -> DriveSpec {
        DriveSpec {
            voltage: 1000.0,
            thickness: 150e-6,
        }
    }

    fn paper_beam() -> BeamSpec {
        BeamSpec {
            lambda0: 0.6328e-6,
            waist_radius: 30e-6,
        }
    }

    #[test]
    fn contrast_matches_published_value() {
        let dn = index_contrast(&MaterialSpec::litao3(), &paper_drive()).unwrap();
        assert!((dn / 2.1e-3 - 1.0).abs() < 0.01, "dn = {dn}");
        // Frozen from direct evaluation of n_e^3 r33 V/d.
        assert!((dn - 2.108610433138409e-3).abs() < 1e-18);
    }

    #[test]
    fn contrast_is_linear_and_signed() {
        let m = MaterialSpec::litao3();
        let dn1 = index_contrast(&m, &paper_drive()).unwrap();
        let half = DriveSpec {
            voltage: 500.0,
            ..paper_drive()
        };
        assert_eq!(index_contrast(&m, &half).unwrap(), 0.5 * dn1);
        let neg = DriveSpec {
            voltage: -1000.0,
            ..paper_drive()
        };
        assert_eq!(index_contrast(&m, &neg).unwrap(), -dn1);
        let zero = DriveSpec {
            voltage: 0.0,
            ..paper_drive()
        };
        assert_eq!(index_contrast(&m, &zero).unwrap(), 0.0);
    }

    #[test]
    fn contrast_refuses_unsafe_drive() {
        let double = DriveSpec {
            voltage: 2000.0,
            ..paper_drive()
        };
        let err = index_contrast(&MaterialSpec::litao3(), &double).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("0.63"),
            "ratio should appear in message: {msg}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn snell_magnification() {
        let m = MaterialSpec::litao3();
        let ext = snell_magnify(40.0e-3, &m);
        assert!((ext - 87.228e-3).abs() < 0.1e-3, "ext = {ext}");
        assert_eq!(snell_magnify(0.0, &m), 0.0);
        assert_eq!(snell_magnify(10.0e-3, &m), 21.807e-3);
        assert_eq!(snell_magnify(-1.0e-3, &m), -snell_magnify(1.0e-3, &m));
    }

    #[test]
    fn entrance_radius() {
        let w = gaussian_radius(&paper_beam(), &MaterialSpec::litao3(), 0.0, 10e-3);
        assert!((w - 43.0e-6).abs() < 0.1e-6, "w(0) = {w}");
        // Frozen from direct evaluation of the Eq. radical.
        assert!((w - 4.2988129370428936e-5).abs() < 1e-18);
    }

    #[test]
    fn waist_and_rayleigh_points() {
        let beam = paper_beam();
        let m = MaterialSpec::litao3();
        let length = 10e-3;
        assert_eq!(
            gaussian_radius(&beam, &m, length, length),
            beam.waist_radius
        );
        let zr = beam.rayleigh_range(&m);
        let w = gaussian_radius(&beam, &m, length - zr, length);
        assert!((w - beam.waist_radius * 2.0_f64.sqrt()).abs() < 1e-18);
    }

    #[test]
    fn divergence_and_spots() {
        let dtheta = far_field_divergence(&paper_beam());
        assert!((dtheta - 13.43e-3).abs() < 0.01e-3, "dtheta = {dtheta}");
        assert_eq!(resolvable_spots(87.3e-3, dtheta), 13);
        assert_eq!(resolvable_spots(0.0, dtheta), 1);
        let doubled = BeamSpec {
            waist_radius: 60e-6,
            ..paper_beam()
        };
        assert_eq!(far_field_divergence(&doubled), 0.5 * dtheta);
        let other = BeamSpec {
            lambda0: 1.0e-6,
            waist_radius: 100e-6,
        };
        assert!((far_field_divergence(&other) - 6.366e-3).abs() < 0.001e-3);
    }

    #[test]
    fn poling_margins() {
        let m = MaterialSpec::litao3();
        let s = poling_safety(&m, &paper_drive());
        assert!((s.ratio - 0.317).abs() < 0.001);
        assert!(s.pass);
        let zero = DriveSpec {
            voltage: 0.0,
            ..paper_drive()
        };
        let s0 = poling_safety(&m, &zero);
        assert_eq!(s0.ratio, 0.0);
        assert!(s0.pass);
        let double = DriveSpec {
            voltage: 2000.0,
            ..paper_drive()
        };
        let s2 = poling_safety(&m, &double);
        assert!((s2.ratio - 0.635).abs() < 0.001);
        assert!(!s2.pass);
    }

    #[test]
    fn spec_validation() {
        assert!(MaterialSpec::litao3().validate().is_ok());
        let mut m = MaterialSpec::litao3();
        m.n_e = 0.9;
        assert!(m.validate().is_err());
        m = MaterialSpec::litao3();
        m.safety_fraction = 0.0;
        assert!(m.validate().is_err());
        assert!(paper_drive().validate().is_ok());
        let bad = DriveSpec {
            voltage: 100.0,
            thickness: 0.0,
        };
        assert!(bad.validate().is_err());
        assert!(paper_beam().validate().is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn contrast_linear_in_voltage(v in -3000.0..3000.0f64, a in -1.0..1.0f64) {
                let m = MaterialSpec::litao3();
                // Thick substrate keeps every drive in the safe range.
                let d = 1e-2;
                let dn = index_contrast(&m, &DriveSpec { voltage: v, thickness: d }).unwrap();
                let dna = index_contrast(&m, &DriveSpec { voltage: a * v, thickness: d }).unwrap();
                // a*(n^3 r33 v/d) and n^3 r33 (a*v)/d round identically only
                // up to one ulp; compare with a tight relative bound.
                prop_assert!((dna - a * dn).abs() <= 1e-15 * dn.abs().max(1e-30));
            }

            #[test]
            fn radius_symmetric_about_waist(s in 0.0..50.0e-3f64) {
                let beam = BeamSpec { lambda0: 0.6328e-6, waist_radius: 30e-6 };
                let m = MaterialSpec::litao3();
                let length = 10e-3;
                let a = gaussian_radius(&beam, &m, length - s, length);
                let b = gaussian_radius(&beam, &m, length + s, length);
                // (L - s) - L and (L + s) - L differ from -+s by rounding,
                // so mirrored arguments agree only to a few ulps.
                prop_assert!((a - b).abs() <= 1e-12 * a);
                prop_assert!(a >= beam.waist_radius);
            }

            #[test]
            fn spots_odd_and_monotone(t1 in 0.0..0.5f64, t2 in 0.0..0.5f64) {
                let dtheta = 13.43e-3;
                let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let a = resolvable_spots(lo, dtheta);
                let b = resolvable_spots(hi, dtheta);
                prop_assert_eq!(a % 2, 1);
                prop_assert_eq!(b % 2, 1);
                prop_assert!(a <= b);
            }

            #[test]
            fn snell_is_odd(theta in -0.2..0.2f64) {
                let m = MaterialSpec::litao3();
                prop_assert_eq!(snell_magnify(-theta, &m), -snell_magnify(theta, &m));
            }
        }
    }
}
