use num_complex::Complex64 as C64;

use super::operator::Operator;
use super::space::HilbertSpace;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;
const EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    /// Row-major `n × n`.
    Density(Vec<C64>),
}

/// Normalised pure state or density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: HilbertSpace,
    repr: Repr,
}

impl QuantumState {
    /// Pure state; the vector must have unit norm within 1e-9.
    pub fn pure(space: &HilbertSpace, amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self {
            space: space.clone(),
            repr: Repr::Pure(amplitudes),
        };
        s.validate()?;
        Ok(s)
    }

    /// Pure state, normalising the input first.
    pub fn pure_normalized(space: &HilbertSpace, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("amplitudes", "cannot normalise a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::pure(space, amplitudes)
    }

    /// Product basis state.
    pub fn basis(space: &HilbertSpace, digits: &[usize]) -> Result<Self> {
        let mut v = vec![C64::new(0.0, 0.0); space.dim()];
        v[space.basis_index(digits)?] = C64::new(1.0, 0.0);
        Self::pure(space, v)
    }

    pub fn density(space: &HilbertSpace, rho: Vec<C64>) -> Result<Self> {
        let s = Self {
            space: space.clone(),
            repr: Repr::Density(rho),
        };
        s.validate()?;
        Ok(s)
    }

    /// Skips the positivity check; used for integrator output, which is
    /// validated in bulk by the caller.
    pub(crate) fn density_unchecked(space: &HilbertSpace, rho: Vec<C64>) -> Self {
        Self {
            space: space.clone(),
            repr: Repr::Density(rho),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Density(_) => None,
        }
    }

    /// Density matrix (computed from the vector for pure states).
    pub fn to_density(&self) -> Vec<C64> {
        match &self.repr {
            Repr::Density(r) => r.clone(),
            Repr::Pure(v) => {
                let n = v.len();
                let mut r = vec![C64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    for j in 0..n {
                        r[i * n + j] = v[i] * v[j].conj();
                    }
                }
                r
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Repr::Density(r) => {
                let n = self.space.dim();
                (0..n).map(|i| r[i * n + i].re).sum()
            }
        }
    }

    /// Diagonal in the product basis.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            Repr::Density(r) => {
                let n = self.space.dim();
                (0..n).map(|i| r[i * n + i].re).collect()
            }
        }
    }

    /// Probability that factor `label` is in level `level`.
    pub fn factor_population(&self, label: &str, level: usize) -> Result<f64> {
        let which = self
            .space
            .index_of(label)
            .ok_or_else(|| Error::invalid("label", format!("no factor named `{label}`")))?;
        Ok(self
            .populations()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.digits(*i)[which] == level)
            .map(|(_, p)| p)
            .sum())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.space.dim();
        match &self.repr {
            Repr::Pure(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: v.len(),
                    });
                }
                if v.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "in state vector".into(),
                    });
                }
                let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                if (norm2.sqrt() - 1.0).abs() > NORM_TOL {
                    return Err(Error::invalid("state", format!("norm {} is not 1", norm2.sqrt())));
                }
            }
            Repr::Density(r) => {
                if r.len() != n * n {
                    return Err(Error::DimensionMismatch {
                        expected: n * n,
                        found: r.len(),
                    });
                }
                if r.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "in density matrix".into(),
                    });
                }
                let herm = hermiticity_error(r, n);
                if herm > NORM_TOL {
                    return Err(Error::invalid("state", format!("not Hermitian (deviation {herm:e})")));
                }
                let tr = self.trace();
                if (tr - 1.0).abs() > NORM_TOL {
                    return Err(Error::invalid("state", format!("trace {tr} is not 1")));
                }
                if !positive_after_shift(r, n, EIG_TOL) {
                    return Err(Error::invalid("state", "negative eigenvalue below -1e-8"));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_error(r: &[C64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((r[i * n + j] - r[j * n + i].conj()).norm());
        }
    }
    worst
}

/// Cholesky of `ρ + shift·I`; succeeds iff the smallest eigenvalue exceeds `-shift`.
pub(crate) fn positive_after_shift(r: &[C64], n: usize, shift: f64) -> bool {
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = r[j * n + j].re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = C64::new(djj, 0.0);
        for i in j + 1..n {
            // Hermitian: use the lower triangle ρ_ij with i > j.
            let mut s = r[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

/// `⟨op⟩` in `state`.
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<C64> {
    if op.space() != state.space() {
        return Err(Error::DimensionMismatch {
            expected: state.space().dim(),
            found: op.dim(),
        });
    }
    Ok(match &state.repr {
        Repr::Pure(v) => {
            let ov = op.apply(v);
            v.iter().zip(&ov).map(|(a, b)| a.conj() * b).sum()
        }
        Repr::Density(r) => {
            let n = op.dim();
            op.entries().map(|(i, j, v)| v * r[j * n + i]).sum()
        }
    })
}
