//! Entanglement loss when the heralding cavity supports a second polarization
//! mode degenerate with the π mode.
//!
//! After the telecom photon, the atom sits in a superposition of the two
//! intermediate sublevels tagged by the telecom polarization (H or V). With a
//! degenerate V mode the herald photon can also leave the atom in the
//! `m_F = 0, ±2` states of the upper ground manifold. Conditioning on a π herald
//! then reweights the H and V branches by their different total emission
//! norms.

use crate::error::{Error, Result};

/// Real relative amplitudes from `|−1⟩_i` (`a`, `b`, `c`) and `|+1⟩_i`
/// (`a′`, `b′`, `c′`) into `m_F = 0`, `|∓1⟩_f` and `m_F = ∓2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionAmplitudes {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub c: f64,
    pub c_prime: f64,
}

const MAG_TOL: f64 = 1e-12;

impl TransitionAmplitudes {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64, c: f64, c_prime: f64) -> Result<Self> {
        let s = Self {
            a,
            a_prime,
            b,
            b_prime,
            c,
            c_prime,
        };
        s.validate()?;
        Ok(s)
    }

    /// The `a′ = a, b′ = b, c′ = c` branch.
    pub fn symmetric(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, a, b, b, c, c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.a_prime, self.b, self.b_prime, self.c, self.c_prime];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "in transition amplitudes".into(),
            });
        }
        let scale = all.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return Err(Error::invalid("amplitudes", "all transition amplitudes are zero"));
        }
        for (name, x, y) in [
            ("a", self.a, self.a_prime),
            ("b", self.b, self.b_prime),
            ("c", self.c, self.c_prime),
        ] {
            if (x.abs() - y.abs()).abs() > MAG_TOL * scale {
                return Err(Error::invalid(name, format!("|{x}| and |{y}| differ")));
            }
        }
        Ok(())
    }

    /// Squared norm of the unprojected H-branch state (before normalization).
    fn h_norm2(&self) -> f64 {
        (self.a + self.a_prime).powi(2) / 2.0
            + self.b.powi(2)
            + self.b_prime.powi(2)
            + (self.c.powi(2) + self.c_prime.powi(2)) / 2.0
    }

    fn v_norm2(&self) -> f64 {
        (self.a - self.a_prime).powi(2) / 2.0
            + self.b.powi(2)
            + self.b_prime.powi(2)
            + (self.c.powi(2) + self.c_prime.powi(2)) / 2.0
    }
}

/// Normalized weights of the H and V telecom branches after a π herald.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectedState {
    pub h_weight: f64,
    pub v_weight: f64,
}

impl PostselectedState {
    /// Squared overlap with the equal-weight Bell state.
    pub fn fidelity(&self) -> f64 {
        0.5 * (self.h_weight + self.v_weight).powi(2)
    }
}

/// Post-selected branch weights.
///
/// Each branch contributes `√2·|b| / ‖branch‖` to the π-projected state, so the
/// weights are proportional to the inverse branch norms. The common `|b|`
/// factor cancels, which keeps the result defined as `b → 0`.
pub fn postselected_state(amps: &TransitionAmplitudes) -> Result<PostselectedState> {
    amps.validate()?;
    let (nh, nv) = (amps.h_norm2(), amps.v_norm2());
    // 1/√nh : 1/√nv  ==  √nv : √nh
    let total = (nh + nv).sqrt();
    Ok(PostselectedState {
        h_weight: nv.sqrt() / total,
        v_weight: nh.sqrt() / total,
    })
}

/// Closed-form fidelity of the post-selected state for the symmetric branch.
pub fn degenerate_mode_fidelity(a: f64, b: f64, c: f64) -> Result<f64> {
    if [a, b, c].iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "in transition amplitudes".into(),
        });
    }
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let d = a2 + 2.0 * b2 + c2;
    if d == 0.0 {
        return Err(Error::invalid("amplitudes", "all transition amplitudes are zero"));
    }
    let f = 0.5 + 0.5 * ((2.0 * a2 + 2.0 * b2 + c2) * (2.0 * b2 + c2)).sqrt() / d;
    Ok(f.min(1.0))
}
