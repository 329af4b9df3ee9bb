use crate::constants::{self, mhz_2pi};
use crate::error::{Error, Result};

/// Atomic levels kept in the simulation, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// 5S₁/₂ F=1, m=0 (initial state)
    Ground,
    /// 4D₃/₂ F''=1, m=0
    Upper,
    /// 5P₁/₂ F'=1, m=+1
    IntermediatePlus,
    /// 5P₁/₂ F'=1, m=−1
    IntermediateMinus,
    /// 5S₁/₂ F=2, m=+1
    FinalPlus,
    /// 5S₁/₂ F=2, m=−1
    FinalMinus,
    /// Anything outside the simulated manifold.
    Sink,
    /// 5S₁/₂ F=2, m=0 (only with the second heralding mode)
    FinalZero,
    /// 5S₁/₂ F=2, m=+2 (only with the second heralding mode)
    FinalPlusTwo,
    /// 5S₁/₂ F=2, m=−2 (only with the second heralding mode)
    FinalMinusTwo,
    /// Off-resonant 4D₃/₂ F''=3 state reached by spectrally broad pulses.
    UpperDark,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Ground => "g",
            Level::Upper => "e",
            Level::IntermediatePlus => "i+",
            Level::IntermediateMinus => "i-",
            Level::FinalPlus => "f+",
            Level::FinalMinus => "f-",
            Level::Sink => "sink",
            Level::FinalZero => "f0",
            Level::FinalPlusTwo => "f+2",
            Level::FinalMinusTwo => "f-2",
            Level::UpperDark => "e3",
        }
    }
}

/// Decay rates, branchings and amplitude signs of the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelScheme {
    /// Total linewidth of the upper state.
    pub gamma_upper: f64,
    /// Free-space decay of the upper state into each of i±.
    pub gamma_upper_to_intermediate: f64,
    /// Total linewidth of the intermediate states.
    pub gamma_intermediate: f64,
    /// Free-space decay of i± into the same-sign final state.
    pub gamma_intermediate_to_final: f64,
    /// Free-space decay of i± straight back into the initial state.
    pub gamma_intermediate_to_ground: f64,
    /// Relative sign of the σ⁻-emitting (i₊) telecom amplitude.
    pub telecom_sign: f64,
    /// Relative sign of the i₊ → f₊ herald amplitude.
    pub herald_sign: f64,
    /// Relative amplitudes (a, b, c) of i → F=2 with Δm = ±1, 0, ∓1.
    pub herald_amplitudes: (f64, f64, f64),
}

impl LevelScheme {
    pub fn rubidium87() -> Self {
        Self {
            gamma_upper: constants::gamma_d32(),
            gamma_upper_to_intermediate: constants::BRANCH_TELECOM * constants::gamma_d32_to_p12(),
            gamma_intermediate: constants::gamma_p12(),
            gamma_intermediate_to_final: constants::BRANCH_HERALD * constants::gamma_p12(),
            gamma_intermediate_to_ground: constants::BRANCH_P12_TO_G * constants::gamma_p12(),
            telecom_sign: 1.0,
            herald_sign: 1.0,
            herald_amplitudes: constants::herald_amplitudes_f2(),
        }
    }

    /// Upper-state decay not ending in i±.
    pub fn gamma_upper_other(&self) -> f64 {
        (self.gamma_upper - 2.0 * self.gamma_upper_to_intermediate).max(0.0)
    }

    /// Intermediate-state decay into neither the same-sign final state nor the initial state.
    pub fn gamma_intermediate_other(&self) -> f64 {
        (self.gamma_intermediate - self.gamma_intermediate_to_final - self.gamma_intermediate_to_ground).max(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_upper", self.gamma_upper),
            ("gamma_upper_to_intermediate", self.gamma_upper_to_intermediate),
            ("gamma_intermediate", self.gamma_intermediate),
            ("gamma_intermediate_to_final", self.gamma_intermediate_to_final),
            ("gamma_intermediate_to_ground", self.gamma_intermediate_to_ground),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} must be a non-negative rate")));
            }
        }
        if 2.0 * self.gamma_upper_to_intermediate > self.gamma_upper * (1.0 + 1e-6) {
            return Err(Error::invalid("gamma_upper_to_intermediate", "partial rates exceed the linewidth"));
        }
        if self.gamma_intermediate_to_final + self.gamma_intermediate_to_ground > self.gamma_intermediate * (1.0 + 1e-6) {
            return Err(Error::invalid("gamma_intermediate_to_final", "partial rates exceed the linewidth"));
        }
        for (name, s) in [("telecom_sign", self.telecom_sign), ("herald_sign", self.herald_sign)] {
            if s != 1.0 && s != -1.0 {
                return Err(Error::invalid(name, "must be +1 or -1"));
            }
        }
        if self.herald_amplitudes.1 == 0.0 {
            return Err(Error::invalid("herald_amplitudes", "the π amplitude b must be non-zero"));
        }
        Ok(())
    }
}

/// One cavity mode as seen by the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates {
    pub coupling: f64,
    pub kappa_oc: f64,
    pub kappa_loss: f64,
}

impl ModeRates {
    pub fn kappa(&self) -> f64 {
        self.kappa_oc + self.kappa_loss
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if [self.coupling, self.kappa_oc, self.kappa_loss]
            .iter()
            .any(|v| !(*v >= 0.0) || !v.is_finite())
        {
            return Err(Error::invalid(name, "rates must be non-negative"));
        }
        Ok(())
    }
}

/// Second (orthogonal-polarisation) heralding mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondHeraldMode {
    /// Cavity detuning from the first heralding mode, rad/s.
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossedCavityParams {
    /// Shared by the degenerate σ⁺ and σ⁻ modes.
    pub entangling: ModeRates,
    pub heralding: ModeRates,
    pub second_herald: Option<SecondHeraldMode>,
    /// Classical telecom fiber-coupling efficiency.
    pub fiber_efficiency: f64,
}

impl CrossedCavityParams {
    pub fn reference() -> Self {
        Self {
            entangling: ModeRates {
                coupling: mhz_2pi(70.0),
                kappa_oc: mhz_2pi(95.0),
                kappa_loss: mhz_2pi(8.0),
            },
            heralding: ModeRates {
                coupling: mhz_2pi(16.3),
                kappa_oc: mhz_2pi(11.9),
                kappa_loss: mhz_2pi(1.5),
            },
            second_herald: None,
            fiber_efficiency: 0.96,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.entangling.validate("entangling")?;
        self.heralding.validate("heralding")?;
        crate::error::check_probability("fiber_efficiency", self.fiber_efficiency)?;
        if let Some(m) = self.second_herald {
            if !m.detuning.is_finite() {
                return Err(Error::invalid("second_herald.detuning", "must be finite"));
            }
        }
        Ok(())
    }
}

/// Off-resonant excitation of a dark upper level by short pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadbandLoss {
    /// Detuning of the dark level from the drive, rad/s.
    pub detuning: f64,
    /// Drive coupling relative to the main transition.
    pub relative_strength: f64,
}

/// Which free-space decays return the atom to the initial state under
/// worst-case recycling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecyclingScope {
    /// Decays leaving the simulated manifold (upper state to anything but i±),
    /// plus the direct i± → g branch.
    LeavingManifold,
    /// Additionally every i± decay into the other ground sublevels.
    AllEscapes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Return escaping decays to the initial state (see [`RecyclingScope`]) and
    /// allow two photons per telecom mode.
    pub worst_case_recycling: bool,
    pub recycling_scope: RecyclingScope,
    /// Multiplies every decay rate that feeds the initial state.
    pub recycling_rate_scale: f64,
    /// Constant detuning of the upper level (light shift), rad/s.
    pub light_shift: f64,
    pub broadband_loss: Option<BroadbandLoss>,
    /// Photon truncation of each telecom mode; `None` picks 1, or 2 with recycling.
    pub telecom_photons: Option<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            worst_case_recycling: false,
            recycling_scope: RecyclingScope::LeavingManifold,
            recycling_rate_scale: 1.0,
            light_shift: 0.0,
            broadband_loss: None,
            telecom_photons: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rubidium_rates_are_consistent() {
        let s = LevelScheme::rubidium87();
        s.validate().unwrap();
        let total = 2.0 * s.gamma_upper_to_intermediate + s.gamma_upper_other();
        assert!((total - s.gamma_upper).abs() < 1e-6 * s.gamma_upper);
        let total = s.gamma_intermediate_to_final + s.gamma_intermediate_to_ground + s.gamma_intermediate_other();
        assert!((total - s.gamma_intermediate).abs() < 1e-6 * s.gamma_intermediate);
        let (a, b, c) = s.herald_amplitudes;
        assert!((a * a + b * b + c * c - 10.0).abs() < 1e-12);
    }

    #[test]
    fn bad_signs_rejected() {
        let mut s = LevelScheme::rubidium87();
        s.herald_sign = 0.5;
        assert!(s.validate().is_err());
    }
}
