//! Bell-diagonal states along a repeater chain and the resulting secret-key
//! fraction.
//!
//! Weights are ordered (Ψ⁺, Ψ⁻, Φ⁺, Φ⁻). Ψ⁺ is the target state throughout.

mod purify;

pub use purify::{
    dejmps_purify, fidelity_gain_threshold, key_rate_benefit_threshold, purification_benefit, GateErrorConvention,
    PurificationReport, PurifyAt,
};

use crate::error::{check_probability, Error, Result};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PsiPlus, BellLabel::PsiMinus, BellLabel::PhiPlus, BellLabel::PhiMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Pauli acting on one qubit of Φ⁺ that produces this state (bit 0 = X, bit 1 = Z).
    fn pauli(self) -> u8 {
        match self {
            BellLabel::PhiPlus => 0,
            BellLabel::PsiPlus => 1,
            BellLabel::PhiMinus => 2,
            BellLabel::PsiMinus => 3,
        }
    }

    fn from_pauli(bits: u8) -> Self {
        match bits & 3 {
            0 => BellLabel::PhiPlus,
            1 => BellLabel::PsiPlus,
            2 => BellLabel::PhiMinus,
            _ => BellLabel::PsiMinus,
        }
    }

    /// Ideal swap output label, with corrections chosen so that Ψ⁺ ∘ Ψ⁺ = Ψ⁺.
    pub fn compose(self, other: BellLabel) -> BellLabel {
        Self::from_pauli(self.pauli() ^ other.pauli() ^ BellLabel::PsiPlus.pauli())
    }
}

/// Two-qubit state diagonal in the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    weights: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite {
                context: "in Bell weights".into(),
            });
        }
        if weights.iter().any(|w| *w < -SUM_TOL) {
            return Err(Error::invalid("weights", format!("{weights:?} has a negative entry")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid("weights", format!("sum {sum} is not 1")));
        }
        Ok(Self {
            weights: weights.map(|w| w.max(0.0)),
        })
    }

    pub fn pure(label: BellLabel) -> Self {
        let mut weights = [0.0; 4];
        weights[label.index()] = 1.0;
        Self { weights }
    }

    pub fn maximally_mixed() -> Self {
        Self { weights: [0.25; 4] }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn weight(&self, label: BellLabel) -> f64 {
        self.weights[label.index()]
    }

    /// Overlap with the Ψ⁺ target.
    pub fn fidelity(&self) -> f64 {
        self.weight(BellLabel::PsiPlus)
    }

    /// `P·ρ + (1−P)·𝟙/4`.
    pub fn depolarize(&self, p: f64) -> Self {
        Self {
            weights: self.weights.map(|w| p * w + (1.0 - p) * 0.25),
        }
    }

    /// Renormalise to absorb rounding drift.
    fn normalized(weights: [f64; 4]) -> Self {
        let sum: f64 = weights.iter().sum();
        Self {
            weights: weights.map(|w| w.max(0.0) / sum),
        }
    }
}

/// Imperfect atomic Bell measurement: with probability `1−P` the output is
/// replaced by the maximally mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapModel {
    p: f64,
}

impl SwapModel {
    pub fn new(p: f64) -> Result<Self> {
        check_probability("P", p)?;
        Ok(Self { p })
    }

    pub fn ideal() -> Self {
        Self { p: 1.0 }
    }

    pub fn from_bsm_fidelity(f: f64) -> Result<Self> {
        Self::new(bsm_fidelity_to_p(f)?)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn bsm_fidelity(&self) -> f64 {
        (1.0 + 3.0 * self.p) / 4.0
    }
}

/// `P = (4F − 1)/3`.
pub fn bsm_fidelity_to_p(f: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&f) {
        return Err(Error::invalid("bsm_fidelity", format!("{f} is outside [1/4, 1]")));
    }
    Ok(((4.0 * f - 1.0) / 3.0).clamp(0.0, 1.0))
}

/// Link state heralded by a photonic Bell measurement with interference contrast `C`.
pub fn state_after_photonic_bsm(contrast: f64) -> Result<BellDiagonalState> {
    check_probability("contrast", contrast)?;
    Ok(BellDiagonalState {
        weights: [(1.0 + contrast) / 2.0, (1.0 - contrast) / 2.0, 0.0, 0.0],
    })
}

pub fn swap(a: &BellDiagonalState, b: &BellDiagonalState, model: SwapModel) -> BellDiagonalState {
    let mut out = [0.0; 4];
    for la in BellLabel::ALL {
        for lb in BellLabel::ALL {
            out[la.compose(lb).index()] += a.weight(la) * b.weight(lb);
        }
    }
    BellDiagonalState::normalized(out).depolarize(model.p)
}

/// End-to-end state of a balanced swap tree over `n` identical links.
pub fn chain_state(n: u32, contrast: f64, model: SwapModel) -> Result<BellDiagonalState> {
    swap_tree(&state_after_photonic_bsm(contrast)?, n, model)
}

/// Balanced swap tree over `n` copies of `link`.
pub fn swap_tree(link: &BellDiagonalState, n: u32, model: SwapModel) -> Result<BellDiagonalState> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("links", format!("{n} is not a power of two")));
    }
    Ok((0..n.trailing_zeros()).fold(*link, |s, _| swap(&s, &s, model)))
}

/// Bit-error rates in the three measurement bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub eps_x: f64,
    pub eps_y: f64,
    pub eps_z: f64,
}

impl ErrorRates {
    pub fn new(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<Self> {
        for (name, e) in [("eps_x", eps_x), ("eps_y", eps_y), ("eps_z", eps_z)] {
            if !(-SUM_TOL..=0.5 + SUM_TOL).contains(&e) {
                return Err(Error::invalid(name, format!("{e} is outside [0, 1/2]")));
            }
        }
        let c = |e: f64| e.clamp(0.0, 0.5);
        Ok(Self {
            eps_x: c(eps_x),
            eps_y: c(eps_y),
            eps_z: c(eps_z),
        })
    }

    /// Quantum bit error rate (the key is drawn from the Z basis).
    pub fn qber(&self) -> f64 {
        self.eps_z
    }
}

pub fn error_rates(s: &BellDiagonalState) -> Result<ErrorRates> {
    let [_, l2, l3, l4] = s.weights;
    ErrorRates::new(l2 + l4, l2 + l3, l3 + l4)
}

/// Binary entropy with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Asymptotic secret fraction; `raw` may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecretFraction {
    pub raw: f64,
}

impl SecretFraction {
    pub fn reported(&self) -> f64 {
        self.raw.clamp(0.0, 1.0)
    }
}

pub fn secret_fraction(e: &ErrorRates) -> SecretFraction {
    let ErrorRates { eps_x, eps_y, eps_z } = *e;
    let mut r = 1.0 - binary_entropy(e.qber());
    if eps_z > 0.0 {
        r -= eps_z * binary_entropy((1.0 + (eps_x - eps_y) / eps_z) / 2.0);
    }
    if eps_z < 1.0 {
        r -= (1.0 - eps_z) * binary_entropy((1.0 - (eps_x + eps_y + eps_z) / 2.0) / (1.0 - eps_z));
    }
    SecretFraction { raw: r }
}

/// Secret fraction of the end-to-end state.
pub fn chain_secret_fraction(n: u32, contrast: f64, bsm_fidelity: f64) -> Result<SecretFraction> {
    let s = chain_state(n, contrast, SwapModel::from_bsm_fidelity(bsm_fidelity)?)?;
    Ok(secret_fraction(&error_rates(&s)?))
}

const THRESHOLD_SCAN: f64 = 1e-3;

/// Lowest BSM fidelity at which the chain still reaches secret fraction `target`.
pub fn threshold_fidelity(contrast: f64, n: u32, target: f64) -> Result<f64> {
    let r = |f: f64| chain_secret_fraction(n, contrast, f).map(|s| s.raw);
    let top = r(1.0)?;
    if (top - target).abs() < 1e-6 {
        return Ok(1.0);
    }
    if top < target {
        return Err(Error::Unreachable(format!(
            "secret fraction {top:.4} at unit BSM fidelity is below {target}"
        )));
    }
    // walk down to bracket the first crossing below F = 1
    let mut hi = 1.0;
    let mut lo = 1.0 - THRESHOLD_SCAN;
    while r(lo)? >= target {
        hi = lo;
        lo -= THRESHOLD_SCAN;
        if lo < 0.25 {
            return Ok(0.25);
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let rm = r(mid)?;
        if (rm - target).abs() < 1e-6 || hi - lo < 1e-14 {
            return Ok(mid);
        }
        if rm >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_is_a_group_with_psi_plus_identity() {
        for a in BellLabel::ALL {
            assert_eq!(a.compose(BellLabel::PsiPlus), a);
            for b in BellLabel::ALL {
                assert_eq!(a.compose(b), b.compose(a));
            }
        }
    }

    #[test]
    fn photonic_bsm_limits() {
        assert_eq!(state_after_photonic_bsm(1.0).unwrap(), BellDiagonalState::pure(BellLabel::PsiPlus));
        assert_eq!(state_after_photonic_bsm(0.0).unwrap().weights(), [0.5, 0.5, 0.0, 0.0]);
        assert!(state_after_photonic_bsm(1.1).is_err());
    }

    #[test]
    fn entropy_limits() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        let perfect = ErrorRates::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(secret_fraction(&perfect).raw, 1.0);
        let mixed = error_rates(&BellDiagonalState::maximally_mixed()).unwrap();
        assert_eq!((mixed.eps_x, mixed.eps_y, mixed.eps_z), (0.5, 0.5, 0.5));
    }

    #[test]
    fn fidelity_conversion() {
        assert_eq!(bsm_fidelity_to_p(1.0).unwrap(), 1.0);
        assert_eq!(bsm_fidelity_to_p(0.25).unwrap(), 0.0);
        assert!((bsm_fidelity_to_p(0.95).unwrap() - 2.8 / 3.0).abs() < 1e-15);
        assert!(bsm_fidelity_to_p(0.2).is_err());
    }

    #[test]
    fn trivial_threshold() {
        assert_eq!(threshold_fidelity(1.0, 1, 1.0).unwrap(), 1.0);
        assert!(threshold_fidelity(0.5, 4, 0.9).is_err());
    }
}
