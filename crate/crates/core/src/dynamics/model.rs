use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::operator::Operator;
use super::space::HilbertSpace;
use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Real time-dependent prefactor of a Hamiltonian term.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// `peak · exp(−4 ln2 (t − center)² / fwhm²)`
    Gaussian { peak: f64, center: f64, fwhm: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Gaussian { peak, center, fwhm } => {
                let x = (t - center) / fwhm;
                peak * (-4.0 * std::f64::consts::LN_2 * x * x).exp()
            }
            Coefficient::Custom(f) => f(t),
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Gaussian { peak, center, fwhm } => {
                write!(f, "Gaussian {{ peak: {peak}, center: {center}, fwhm: {fwhm} }}")
            }
            Coefficient::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    pub coefficient: Coefficient,
    /// Hermitian, in rad/s.
    pub operator: Operator,
}

/// Labelled collapse operator; `√rate` is folded into the operator.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub label: String,
    pub operator: Operator,
}

/// `H(t) = Σ c_k(t) H_k` plus collapse channels on one space.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    space: HilbertSpace,
    terms: Vec<HamiltonianTerm>,
    channels: Vec<CollapseChannel>,
    max_step: Option<f64>,
    // H_static − i/2 Σ L†L
    h_eff_static: Operator,
    dynamic: Vec<(Coefficient, Operator)>,
    jump_ops: Vec<Operator>,
    jump_norm_ops: Vec<Operator>,
}

impl LindbladModel {
    pub fn new(
        space: HilbertSpace,
        terms: Vec<HamiltonianTerm>,
        channels: Vec<CollapseChannel>,
    ) -> Result<Self> {
        let n = space.dim();
        for t in &terms {
            if t.operator.space() != &space {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.operator.dim(),
                });
            }
            if !t.operator.is_hermitian(1e-9 * (1.0 + max_abs(&t.operator))) {
                return Err(Error::invalid("hamiltonian", "term is not Hermitian"));
            }
        }
        for (i, c) in channels.iter().enumerate() {
            if c.operator.space() != &space {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.operator.dim(),
                });
            }
            if channels[..i].iter().any(|o| o.label == c.label) {
                return Err(Error::invalid("channels", format!("duplicate label `{}`", c.label)));
            }
        }
        let mut h_eff_static = Operator::zeros(&space);
        let mut dynamic = Vec::new();
        for t in &terms {
            if t.coefficient.is_constant() {
                h_eff_static = h_eff_static.add(&t.operator.scale_re(t.coefficient.at(0.0)))?;
            } else {
                dynamic.push((t.coefficient.clone(), t.operator.clone()));
            }
        }
        let mut jump_norm_ops = Vec::with_capacity(channels.len());
        for c in &channels {
            let ldl = c.operator.adjoint().mul(&c.operator)?;
            h_eff_static = h_eff_static.add(&ldl.scale(C64::new(0.0, -0.5)))?;
            jump_norm_ops.push(ldl);
        }
        let jump_ops = channels.iter().map(|c| c.operator.clone()).collect();
        Ok(Self {
            space,
            terms,
            channels,
            max_step: None,
            h_eff_static,
            dynamic,
            jump_ops,
            jump_norm_ops,
        })
    }

    /// Upper bound on the integrator step (e.g. a fraction of a pulse width).
    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    pub fn max_step(&self) -> Option<f64> {
        self.max_step
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    pub fn channel_index(&self, label: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.label == label)
    }

    /// `L_k† L_k` for channel `k`; its expectation is the jump rate.
    pub fn jump_rate_operator(&self, k: usize) -> &Operator {
        &self.jump_norm_ops[k]
    }

    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        let mut h = Operator::zeros(&self.space);
        for term in &self.terms {
            h = h
                .add(&term.operator.scale_re(term.coefficient.at(t)))
                .expect("terms share the model space");
        }
        h
    }

    /// Does any collapse channel populate basis states where factor `label` sits at `level`?
    pub fn channel_feeds(&self, label: &str, level: usize) -> bool {
        let Some(which) = self.space.index_of(label) else {
            return false;
        };
        self.channels.iter().any(|c| {
            c.operator
                .entries()
                .any(|(r, col, _)| {
                    self.space.digits(r)[which] == level && self.space.digits(col)[which] != level
                })
        })
    }

    /// `dψ/dt = −i H_eff(t) ψ`.
    #[inline]
    pub(crate) fn schrodinger_rhs(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        self.h_eff_static.apply_add(psi, -I, out);
        for (c, h) in &self.dynamic {
            let v = c.at(t);
            if v != 0.0 {
                h.apply_add(psi, C64::new(0.0, -v), out);
            }
        }
    }

    /// `dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ L ρ L†` for Hermitian ρ.
    pub(crate) fn master_rhs(&self, t: f64, rho: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        let n = self.space.dim();
        scratch.clear();
        scratch.resize(n * n, C64::new(0.0, 0.0));
        // scratch = −i H_eff ρ
        self.h_eff_static.left_mul_dense_add(rho, -I, scratch);
        for (c, h) in &self.dynamic {
            let v = c.at(t);
            if v != 0.0 {
                h.left_mul_dense_add(rho, C64::new(0.0, -v), scratch);
            }
        }
        // out = X + X†, which equals −i(H_eff ρ − ρ H_eff†) for Hermitian ρ
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = scratch[i * n + j] + scratch[j * n + i].conj();
            }
        }
        for l in &self.jump_ops {
            scratch.iter_mut().for_each(|s| *s = C64::new(0.0, 0.0));
            l.left_mul_dense_add(rho, C64::new(1.0, 0.0), scratch);
            l.right_mul_adjoint_dense_add(scratch, out);
        }
        // Project onto Hermitian matrices. Without this, rounding noise in the
        // anti-Hermitian part is amplified by L·L† and never damped.
        for i in 0..n {
            out[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (out[i * n + j] + out[j * n + i].conj()) * 0.5;
                out[i * n + j] = avg;
                out[j * n + i] = avg.conj();
            }
        }
    }

    pub(crate) fn jump_op(&self, k: usize) -> &Operator {
        &self.jump_ops[k]
    }
}

fn max_abs(op: &Operator) -> f64 {
    op.entries().map(|e| e.2.norm()).fold(0.0, f64::max)
}
