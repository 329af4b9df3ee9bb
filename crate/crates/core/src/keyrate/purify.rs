use super::{error_rates, secret_fraction, swap_tree, BellDiagonalState, BellLabel, SwapModel};
use crate::error::{check_probability, Error, Result};

/// How a quoted gate error `e` maps to the depolarizing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateErrorConvention {
    /// `e = 1 − P`, the weight of the depolarizing admixture.
    Depolarizing,
    /// `e = 1 − (1+3P)/4 = ¾(1 − P)`, the infidelity of the operation.
    Infidelity,
}

impl GateErrorConvention {
    pub const ALL: [GateErrorConvention; 2] = [GateErrorConvention::Depolarizing, GateErrorConvention::Infidelity];

    pub fn p_from_error(self, e: f64) -> Result<f64> {
        let p = match self {
            GateErrorConvention::Depolarizing => 1.0 - e,
            GateErrorConvention::Infidelity => 1.0 - 4.0 * e / 3.0,
        };
        check_probability("gate P", p)?;
        Ok(p)
    }

    fn max_error(self) -> f64 {
        match self {
            GateErrorConvention::Depolarizing => 1.0,
            GateErrorConvention::Infidelity => 0.75,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GateErrorConvention::Depolarizing => "1-P",
            GateErrorConvention::Infidelity => "3/4(1-P)",
        }
    }
}

/// Where a single purification round is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurifyAt {
    /// Two end-to-end pairs are purified after all swaps.
    EndToEnd,
    /// Every elementary link is purified before swapping.
    ElementaryLinks,
}

// Our weights (Ψ⁺, Ψ⁻, Φ⁺, Φ⁻) after a local X on one qubit, in the usual
// recurrence order (Φ⁺, Ψ⁻, Ψ⁺, Φ⁻): the target lands in the first slot.
fn to_recurrence(s: &BellDiagonalState) -> [f64; 4] {
    [
        s.weight(BellLabel::PsiPlus),
        s.weight(BellLabel::PhiMinus),
        s.weight(BellLabel::PhiPlus),
        s.weight(BellLabel::PsiMinus),
    ]
}

fn from_recurrence([a, b, c, d]: [f64; 4]) -> [f64; 4] {
    [a, d, c, b]
}

/// One round of the two-pair recurrence protocol with rotated bilateral CNOTs.
///
/// Both inputs are depolarized with `p_gate` first. Returns the success
/// probability and the kept pair.
pub fn dejmps_purify(s1: &BellDiagonalState, s2: &BellDiagonalState, p_gate: f64) -> Result<(f64, BellDiagonalState)> {
    check_probability("p_gate", p_gate)?;
    let [a1, b1, c1, d1] = to_recurrence(&s1.depolarize(p_gate));
    let [a2, b2, c2, d2] = to_recurrence(&s2.depolarize(p_gate));
    let p = (a1 + b1) * (a2 + b2) + (c1 + d1) * (c2 + d2);
    if !(p > 0.0) {
        return Err(Error::ZeroProbability("purification never succeeds for these inputs".into()));
    }
    let out = [
        (a1 * a2 + b1 * b2) / p,
        (c1 * d2 + d1 * c2) / p,
        (c1 * c2 + d1 * d2) / p,
        (a1 * b2 + b1 * a2) / p,
    ];
    Ok((p, BellDiagonalState::normalized(from_recurrence(out))))
}

/// Effect of one purification round on fidelity and on secret-key rate.
///
/// Key rates are relative to the unpurified pair rate; purification consumes two
/// pairs per attempt, so the purified rate carries a factor `p/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurificationReport {
    pub fidelity_without: f64,
    pub fidelity_with: f64,
    pub success_probability: f64,
    pub secret_without: f64,
    pub secret_with: f64,
    pub key_rate_without: f64,
    pub key_rate_with: f64,
}

impl PurificationReport {
    pub fn fidelity_gain(&self) -> f64 {
        self.fidelity_with - self.fidelity_without
    }

    /// `None` when the unpurified chain yields no key.
    pub fn key_rate_ratio(&self) -> Option<f64> {
        (self.key_rate_without > 0.0).then(|| self.key_rate_with / self.key_rate_without)
    }

    pub fn key_rate_benefit(&self) -> bool {
        self.key_rate_with > self.key_rate_without
    }
}

/// Compare a chain of `n` links with contrast `C` with and without one
/// purification round. Swaps and purification gates share the parameter `p_gate`.
pub fn purification_benefit(contrast: f64, n: u32, p_gate: f64, at: PurifyAt) -> Result<PurificationReport> {
    let model = SwapModel::new(p_gate)?;
    let link = super::state_after_photonic_bsm(contrast)?;
    let plain = swap_tree(&link, n, model)?;
    let (p, purified) = match at {
        PurifyAt::EndToEnd => dejmps_purify(&plain, &plain, p_gate)?,
        PurifyAt::ElementaryLinks => {
            let (p, l) = dejmps_purify(&link, &link, p_gate)?;
            (p, swap_tree(&l, n, model)?)
        }
    };
    let secret_without = secret_fraction(&error_rates(&plain)?).raw;
    let secret_with = secret_fraction(&error_rates(&purified)?).raw;
    Ok(PurificationReport {
        fidelity_without: plain.fidelity(),
        fidelity_with: purified.fidelity(),
        success_probability: p,
        secret_without,
        secret_with,
        key_rate_without: secret_without.max(0.0),
        key_rate_with: 0.5 * p * secret_with.max(0.0),
    })
}

const SCAN: f64 = 1e-3;

/// Bisect `f` on `[lo, hi]` where the sign differs at the ends.
fn bisect<F: FnMut(f64) -> Result<f64>>(mut lo: f64, mut hi: f64, mut f: F) -> Result<f64> {
    let f_lo = f(lo)?;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest gate error for which end-to-end purification still raises the fidelity.
pub fn fidelity_gain_threshold(contrast: f64, n: u32, convention: GateErrorConvention) -> Result<f64> {
    let gain = |e: f64| -> Result<f64> {
        let p = convention.p_from_error(e)?;
        Ok(purification_benefit(contrast, n, p, PurifyAt::EndToEnd)?.fidelity_gain())
    };
    if gain(0.0)? <= 0.0 {
        return Err(Error::Unreachable("purification does not help even with perfect gates".into()));
    }
    let mut e = SCAN;
    while e <= convention.max_error() {
        if gain(e)? <= 0.0 {
            return bisect(e - SCAN, e, gain);
        }
        e += SCAN;
    }
    Err(Error::Unreachable("fidelity gain persists at every gate error".into()))
}

/// Highest contrast at which one purification round raises the secret-key rate
/// with perfect gates.
pub fn key_rate_benefit_threshold(n: u32, at: PurifyAt) -> Result<f64> {
    let excess = |c: f64| -> Result<f64> {
        let r = purification_benefit(c, n, 1.0, at)?;
        Ok(r.key_rate_with - r.key_rate_without)
    };
    let mut c = 1.0 - SCAN;
    let mut prev = excess(c)?;
    if prev > 0.0 {
        return Ok(1.0);
    }
    while c > SCAN {
        let next = c - SCAN;
        let v = excess(next)?;
        if v > 0.0 && prev <= 0.0 {
            return bisect(next, c, excess);
        }
        prev = v;
        c = next;
    }
    Err(Error::Unreachable(format!(
        "purification never raises the key rate for N = {n} ({at:?})"
    )))
}
