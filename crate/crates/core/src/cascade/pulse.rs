use std::f64::consts::{LN_2, PI};

use crate::dynamics::Coefficient;
use crate::error::{check_positive, Error, Result};

use super::model::{CascadeModel, CascadeSetup};

/// Gaussian effective two-photon drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPulse {
    pub fwhm: f64,
    /// Peak effective Rabi frequency Ω₀, rad/s.
    pub peak_rabi: f64,
    pub center: f64,
}

impl ControlPulse {
    pub fn new(fwhm: f64, peak_rabi: f64, center: f64) -> Result<Self> {
        check_positive("fwhm", fwhm)?;
        if !(peak_rabi >= 0.0) || !peak_rabi.is_finite() {
            return Err(Error::invalid("peak_rabi", "must be non-negative"));
        }
        if !center.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        Ok(Self { fwhm, peak_rabi, center })
    }

    /// Pulse centred at the default position for its width.
    pub fn centered(fwhm: f64, peak_rabi: f64) -> Result<Self> {
        Self::new(fwhm, peak_rabi, default_center(fwhm))
    }

    pub fn rabi_at(&self, t: f64) -> f64 {
        self.coefficient(1.0).at(t)
    }

    /// ∫Ω dt
    pub fn area(&self) -> f64 {
        self.peak_rabi * self.fwhm * (PI / (4.0 * LN_2)).sqrt()
    }

    /// Peak Rabi frequency giving a pulse area of π.
    pub fn pi_peak(fwhm: f64) -> f64 {
        PI / (fwhm * (PI / (4.0 * LN_2)).sqrt())
    }

    pub(crate) fn coefficient(&self, scale: f64) -> Coefficient {
        Coefficient::Gaussian {
            peak: scale * self.peak_rabi,
            center: self.center,
            fwhm: self.fwhm,
        }
    }
}

/// Pulse centre: two widths after the window start.
pub fn default_center(fwhm: f64) -> f64 {
    2.0 * fwhm
}

/// Result of [`calibrate_pulse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub pulse: ControlPulse,
    /// Population left in the initial state at the end of the window.
    pub residual: f64,
}

pub const TARGET_RESIDUAL: f64 = 0.01;
const SCAN_FACTOR: f64 = 1.05;
const BISECT_REL: f64 = 1e-3;
const MAX_PEAK_OVER_PI: f64 = 1e3;

/// Smallest Ω₀ (to 0.1 %) leaving less than 1 % of the population in the
/// initial state at the end of the window.
///
/// Recycling back into the initial state is switched off while calibrating, so
/// the same pulse serves the plain and the worst-case model.
pub fn calibrate_pulse(setup: &CascadeSetup, fwhm: f64) -> Result<Calibration> {
    if !(0.5e-9..=50e-9).contains(&fwhm) {
        return Err(Error::invalid("fwhm", format!("{fwhm:e} s is outside 0.5–50 ns")));
    }
    let mut base = setup.clone();
    base.options.worst_case_recycling = false;
    base.options.telecom_photons = None;
    let residual = |peak: f64| -> Result<f64> {
        let m = base.build(&ControlPulse::centered(fwhm, peak)?)?;
        m.ground_residual()
    };

    let pi_peak = ControlPulse::pi_peak(fwhm);
    let mut lo = 0.25 * pi_peak;
    let mut r_lo = residual(lo)?;
    while r_lo < TARGET_RESIDUAL {
        lo /= 2.0;
        if lo < 1e-6 * pi_peak {
            return Err(Error::Calibration("residual below target even without drive".into()));
        }
        r_lo = residual(lo)?;
    }
    let mut hi = lo;
    let mut r_hi = r_lo;
    while r_hi >= TARGET_RESIDUAL {
        lo = hi;
        hi *= SCAN_FACTOR;
        if hi > MAX_PEAK_OVER_PI * pi_peak {
            return Err(Error::Calibration(format!(
                "residual {r_hi:.4} still above {TARGET_RESIDUAL} at Ω₀ = {hi:e} rad/s"
            )));
        }
        r_hi = residual(hi)?;
    }
    while hi / lo - 1.0 > BISECT_REL {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid)?;
        if r < TARGET_RESIDUAL {
            hi = mid;
            r_hi = r;
        } else {
            lo = mid;
        }
    }
    Ok(Calibration { pulse: ControlPulse::centered(fwhm, hi)?, residual: r_hi })
}

/// Convenience: a model of `setup` driven by a freshly calibrated pulse.
pub fn calibrated_model(setup: &CascadeSetup, fwhm: f64) -> Result<(CascadeModel, Calibration)> {
    let cal = calibrate_pulse(setup, fwhm)?;
    Ok((setup.build(&cal.pulse)?, cal))
}
