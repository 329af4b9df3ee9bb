//! Gaussian-resonator optics and cavity-QED rates.
//!
//! Lengths are in metres, losses in ppm and rates in rad/s (field decay).

use std::f64::consts::PI;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{check_positive, Error, Result};

/// Mirror losses of a two-mirror cavity with one output coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSet {
    pub transmission_oc_ppm: f64,
    pub transmission_hr_ppm: f64,
    /// Scatter and absorption, per mirror.
    pub parasitic_ppm: f64,
}

impl MirrorSet {
    pub fn new(transmission_oc_ppm: f64, transmission_hr_ppm: f64, parasitic_ppm: f64) -> Result<Self> {
        for (name, v) in [
            ("transmission_oc", transmission_oc_ppm),
            ("transmission_hr", transmission_hr_ppm),
            ("parasitic_loss", parasitic_ppm),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} ppm must be non-negative")));
            }
        }
        Ok(Self { transmission_oc_ppm, transmission_hr_ppm, parasitic_ppm })
    }

    /// Round-trip loss that does not leave through the output coupler, in ppm.
    pub fn non_output_ppm(&self) -> f64 {
        self.transmission_hr_ppm + 2.0 * self.parasitic_ppm
    }
}

/// Two-mirror resonator. Mirror 1 sits at z = 0, mirror 2 at z = `length`.
/// A flat mirror has `f64::INFINITY` radius of curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub length: f64,
    pub roc1: f64,
    pub roc2: f64,
    pub wavelength: f64,
}

impl CavityGeometry {
    pub fn new(length: f64, roc1: f64, roc2: f64, wavelength: f64) -> Result<Self> {
        check_positive("length", length)?;
        check_positive("wavelength", wavelength)?;
        if !(roc1 > 0.0) || !(roc2 > 0.0) {
            return Err(Error::invalid("roc", "radii of curvature must be positive (concave)"));
        }
        let g = Self { length, roc1, roc2, wavelength };
        let p = g.stability_product();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::UnstableResonator { g1g2: p });
        }
        Ok(g)
    }

    /// (1 − L/R₁, 1 − L/R₂)
    pub fn g_factors(&self) -> (f64, f64) {
        (1.0 - self.length / self.roc1, 1.0 - self.length / self.roc2)
    }

    pub fn stability_product(&self) -> f64 {
        let (g1, g2) = self.g_factors();
        g1 * g2
    }
}

/// Fundamental Gaussian mode of a [`CavityGeometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    pub waist: f64,
    /// Distance of the waist from mirror 1.
    pub waist_position: f64,
    pub rayleigh_range: f64,
    pub wavelength: f64,
}

impl ModeGeometry {
    /// Mode radius at distance `z` from mirror 1.
    pub fn radius_at(&self, z: f64) -> f64 {
        let u = (z - self.waist_position) / self.rayleigh_range;
        self.waist * (1.0 + u * u).sqrt()
    }

    /// Wavefront radius of curvature at distance `z` from mirror 1 (infinite at the waist).
    pub fn wavefront_roc_at(&self, z: f64) -> f64 {
        let d = z - self.waist_position;
        if d == 0.0 {
            f64::INFINITY
        } else {
            (d * (1.0 + (self.rayleigh_range / d).powi(2))).abs()
        }
    }
}

pub fn mode_geometry(geom: &CavityGeometry) -> Result<ModeGeometry> {
    let (g1, g2) = geom.g_factors();
    let p = g1 * g2;
    let l = geom.length;
    let denom = g1 + g2 - 2.0 * p;
    let (z1, zr) = if g1.abs() < 1e-12 && g2.abs() < 1e-12 {
        // symmetric confocal
        (0.5 * l, 0.5 * l)
    } else {
        if !(p > 0.0 && p < 1.0) || denom.abs() < 1e-15 {
            return Err(Error::UnstableResonator { g1g2: p });
        }
        let zr2 = l * l * p * (1.0 - p) / (denom * denom);
        (l * g2 * (1.0 - g1) / denom, zr2.sqrt())
    };
    Ok(ModeGeometry {
        waist: (geom.wavelength * zr / PI).sqrt(),
        waist_position: z1,
        rayleigh_range: zr,
        wavelength: geom.wavelength,
    })
}

/// Field decay rates (output coupling, other losses) for a cavity of `length`.
pub fn kappa_rates(mirrors: &MirrorSet, length: f64) -> Result<(f64, f64)> {
    check_positive("length", length)?;
    let per_ppm = SPEED_OF_LIGHT * 1e-6 / (4.0 * length);
    Ok((per_ppm * mirrors.transmission_oc_ppm, per_ppm * mirrors.non_output_ppm()))
}

/// Atom-cavity coupling for an atom at distance `atom_position` from mirror 1,
/// on a transition of partial linewidth `partial_linewidth` (rad/s).
pub fn coupling_g(geom: &CavityGeometry, partial_linewidth: f64, atom_position: f64) -> Result<f64> {
    if !(partial_linewidth >= 0.0) {
        return Err(Error::invalid("partial_linewidth", "must be non-negative"));
    }
    if !(atom_position >= 0.0 && atom_position <= geom.length) {
        return Err(Error::invalid("atom_position", "atom must sit between the mirrors"));
    }
    let w = mode_geometry(geom)?.radius_at(atom_position);
    let volume = PI * w * w * geom.length / 4.0;
    let lambda = geom.wavelength;
    Ok((3.0 * SPEED_OF_LIGHT * lambda * lambda * partial_linewidth / (8.0 * PI * volume)).sqrt())
}

/// g²/(κΓ) with total field decay κ and atomic linewidth Γ.
pub fn cooperativity(g: f64, kappa_total: f64, gamma: f64) -> Result<f64> {
    check_positive("kappa_total", kappa_total)?;
    check_positive("gamma", gamma)?;
    Ok(g * g / (kappa_total * gamma))
}

/// Power overlap between a cavity mode (radius `mode_radius`, wavefront curvature
/// `wavefront_roc` at the output mirror) and a fiber mode of radius `fiber_radius`,
/// with the curvature seen through a substrate of refractive index `index`.
pub fn fiber_overlap(
    mode_radius: f64,
    wavefront_roc: f64,
    fiber_radius: f64,
    wavelength: f64,
    index: f64,
) -> Result<f64> {
    check_positive("mode_radius", mode_radius)?;
    check_positive("fiber_radius", fiber_radius)?;
    check_positive("wavelength", wavelength)?;
    check_positive("index", index)?;
    if !(wavefront_roc > 0.0) {
        return Err(Error::invalid("wavefront_roc", "must be positive (infinite for a flat front)"));
    }
    let ratio = fiber_radius / mode_radius + mode_radius / fiber_radius;
    let phase = PI * index * fiber_radius * mode_radius / (wavelength * wavefront_roc);
    Ok(4.0 / (ratio * ratio + phase * phase))
}

/// Everything derived for one cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCavityParams {
    pub mode: ModeGeometry,
    /// Mode radius at the atom.
    pub radius_at_atom: f64,
    pub kappa_oc: f64,
    pub kappa_loss: f64,
    pub g_coupling: f64,
    pub cooperativity: f64,
}

/// Atom, transition and mirror inputs for [`derive_cavity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityDesign {
    pub geometry: CavityGeometry,
    pub mirrors: MirrorSet,
    pub partial_linewidth: f64,
    /// Linewidth entering the cooperativity.
    pub atomic_linewidth: f64,
    pub atom_position: f64,
}

pub fn derive_cavity(design: &CavityDesign) -> Result<DerivedCavityParams> {
    let mode = mode_geometry(&design.geometry)?;
    let (kappa_oc, kappa_loss) = kappa_rates(&design.mirrors, design.geometry.length)?;
    let g = coupling_g(&design.geometry, design.partial_linewidth, design.atom_position)?;
    Ok(DerivedCavityParams {
        mode,
        radius_at_atom: mode.radius_at(design.atom_position),
        kappa_oc,
        kappa_loss,
        g_coupling: g,
        cooperativity: cooperativity(g, kappa_oc + kappa_loss, design.atomic_linewidth)?,
    })
}

/// Reference designs of the two crossed cavities.
pub mod reference {
    use super::*;
    use crate::constants::*;

    /// 75 µm telecom cavity, ROC 100/200 µm, output coupler on the 200 µm mirror.
    pub fn entangling() -> CavityDesign {
        let geometry = CavityGeometry::new(75e-6, 100e-6, 200e-6, LAMBDA_TELECOM).expect("stable");
        CavityDesign {
            geometry,
            mirrors: MirrorSet::new(600.0, 10.0, 20.0).expect("valid"),
            partial_linewidth: BRANCH_TELECOM * gamma_d32_to_p12(),
            atomic_linewidth: gamma_d32(),
            atom_position: 37.5e-6,
        }
    }

    /// 400 µm symmetric cavity at 795 nm, ROC 500/500 µm.
    pub fn heralding() -> CavityDesign {
        let geometry = CavityGeometry::new(400e-6, 500e-6, 500e-6, LAMBDA_HERALD).expect("stable");
        CavityDesign {
            geometry,
            mirrors: MirrorSet::new(400.0, 10.0, 20.0).expect("valid"),
            partial_linewidth: BRANCH_HERALD * gamma_p12(),
            atomic_linewidth: gamma_p12(),
            atom_position: 200e-6,
        }
    }

    /// Fiber mode-field radius used for the telecom output.
    pub const FIBER_MODE_RADIUS: f64 = 5e-6;
}
