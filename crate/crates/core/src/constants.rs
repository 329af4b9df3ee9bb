//! Physical constants and ⁸⁷Rb transition data.
//!
//! Rates are angular frequencies in rad/s. `mhz_2pi(x)` converts a value quoted
//! as "2π × x MHz".

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Convert "2π × `mhz` MHz" to rad/s.
pub fn mhz_2pi(mhz: f64) -> f64 {
    2.0 * PI * mhz * 1e6
}

/// Convert rad/s to "2π × MHz".
pub fn to_mhz_2pi(rate: f64) -> f64 {
    rate / (2.0 * PI * 1e6)
}

/// Heralding transition 5²S₁/₂ ↔ 5²P₁/₂ (D1 line).
pub const LAMBDA_HERALD: f64 = 795e-9;
/// Telecom transition 5²P₁/₂ ↔ 4²D₃/₂.
pub const LAMBDA_TELECOM: f64 = 1476e-9;

/// Total decay rate of 5²P₁/₂ (2π × 5.75 MHz).
pub fn gamma_p12() -> f64 {
    mhz_2pi(5.75)
}

/// Partial decay rate 4²D₃/₂ → 5²P₁/₂ (2π × 1.62 MHz).
pub fn gamma_d32_to_p12() -> f64 {
    mhz_2pi(1.62)
}

/// Partial decay rate 4²D₃/₂ → 5²P₃/₂ (2π × 0.30 MHz).
pub fn gamma_d32_to_p32() -> f64 {
    mhz_2pi(0.30)
}

/// Total decay rate of 4²D₃/₂.
pub fn gamma_d32() -> f64 {
    gamma_d32_to_p12() + gamma_d32_to_p32()
}

/// Relative strength of 5²P₁/₂|F'=1, m=±1⟩ → 5²S₁/₂|F=2, m=±1⟩ (π).
pub const BRANCH_HERALD: f64 = 0.25;

/// Fraction of 4²D₃/₂|F''=1, m=0⟩ → 5²P₁/₂ decay ending in each |F'=1, m=±1⟩.
pub const BRANCH_TELECOM: f64 = 5.0 / 12.0;

/// Relative strength of 5²P₁/₂|F'=1, m=±1⟩ → 5²S₁/₂|F=1, m=0⟩ (the initial state).
pub const BRANCH_P12_TO_G: f64 = 1.0 / 12.0;

/// Relative transition amplitudes (a, b, c) from 5²P₁/₂|F'=1⟩ into 5²S₁/₂|F=2⟩.
pub fn herald_amplitudes_f2() -> (f64, f64, f64) {
    (-1.0, 3f64.sqrt(), -(6f64.sqrt()))
}

/// Typical refractive index of a silica telecom fiber.
pub const FIBER_INDEX: f64 = 1.45;
