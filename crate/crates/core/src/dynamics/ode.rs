//! Adaptive Dormand–Prince 5(4) integrator with continuous output for complex vectors.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { atol: 1e-9, rtol: 1e-7 }
    }
}

/// Interpolant over the last accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<'a> {
    t0: f64,
    h: f64,
    rcont: &'a [Vec<C64>; 5],
}

impl DenseStep<'_> {
    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.h
    }

    /// Writes the interpolated state at `t` (clamped into the step) to `out`.
    pub fn eval(&self, t: f64, out: &mut [C64]) {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * th1) * th) * th1) * th;
        }
    }
}

/// Stepper state. The right-hand side is supplied on every call so it may borrow freely.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    tol: Tolerances,
    h_max: f64,
    t: f64,
    h: f64,
    y: Vec<C64>,
    k: [Vec<C64>; 7],
    ytmp: Vec<C64>,
    ynew: Vec<C64>,
    rcont: [Vec<C64>; 5],
    last_t0: f64,
    last_h: f64,
    fsal_valid: bool,
    accepted: u64,
    rejected: u64,
}

impl Dopri5 {
    pub fn new(t0: f64, y0: Vec<C64>, tol: Tolerances, h_max: Option<f64>) -> Self {
        let n = y0.len();
        let z = || vec![C64::new(0.0, 0.0); n];
        Self {
            tol,
            h_max: h_max.unwrap_or(f64::INFINITY),
            t: t0,
            h: 0.0,
            y: y0,
            k: [z(), z(), z(), z(), z(), z(), z()],
            ytmp: z(),
            ynew: z(),
            rcont: [z(), z(), z(), z(), z()],
            last_t0: t0,
            last_h: 0.0,
            fsal_valid: false,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[C64] {
        &self.y
    }

    pub fn step_counts(&self) -> (u64, u64) {
        (self.accepted, self.rejected)
    }

    /// Replaces the state (e.g. after a quantum jump). Step size memory is kept.
    pub fn reset(&mut self, t: f64, y: &[C64]) {
        self.t = t;
        self.y.copy_from_slice(y);
        self.fsal_valid = false;
    }

    pub fn dense(&self) -> DenseStep<'_> {
        DenseStep { t0: self.last_t0, h: self.last_h, rcont: &self.rcont }
    }

    fn initial_step<F>(&mut self, f: &mut F, t_end: f64) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = self.y.len().max(1) as f64;
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..self.y.len() {
            let sk = self.tol.atol + self.tol.rtol * self.y[i].norm();
            d0 += (self.y[i].norm() / sk).powi(2);
            d1 += (self.k[0][i].norm() / sk).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let span = (t_end - self.t).abs();
        let mut h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 * span } else { 0.01 * d0 / d1 };
        h = h.min(self.h_max).min(span);
        for i in 0..self.y.len() {
            self.ytmp[i] = self.y[i] + self.k[0][i] * h;
        }
        let (k1, rest) = self.k.split_at_mut(1);
        f(self.t + h, &self.ytmp, &mut rest[0]);
        let mut d2 = 0.0;
        for i in 0..self.y.len() {
            let sk = self.tol.atol + self.tol.rtol * self.y[i].norm();
            d2 += ((rest[0][i] - k1[0][i]).norm() / sk).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 { (h * 1e-3).max(1e-6 * span) } else { (0.01 / dm).powf(0.2) };
        (100.0 * h).min(h1).min(self.h_max).min(span)
    }

    /// Takes one accepted step without passing `t_end`.
    pub fn step<F>(&mut self, f: &mut F, t_end: f64) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = self.y.len();
        if !self.fsal_valid {
            f(self.t, &self.y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(f, t_end);
        }
        let mut reject = false;
        loop {
            let remaining = t_end - self.t;
            let mut h = self.h.min(self.h_max);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let h_floor = 1e-14 * self.t.abs().max(remaining.abs()).max(f64::MIN_POSITIVE);
            if h <= h_floor || !h.is_finite() {
                return Err(Error::StepSizeFailure { time: self.t, step: h });
            }
            let t = self.t;
            let y = &self.y;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let yt = &mut self.ytmp;
            for i in 0..n {
                yt[i] = y[i] + k1[i] * (h * A21);
            }
            f(t + C2 * h, yt, k2);
            for i in 0..n {
                yt[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
            }
            f(t + C3 * h, yt, k3);
            for i in 0..n {
                yt[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            f(t + C4 * h, yt, k4);
            for i in 0..n {
                yt[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            f(t + C5 * h, yt, k5);
            for i in 0..n {
                yt[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            f(t + h, yt, k6);
            let yn = &mut self.ynew;
            for i in 0..n {
                yn[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
            }
            f(t + h, yn, k7);
            // max norm: an RMS over n² density-matrix entries would let single
            // entries drift by √n² times the tolerance
            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * h;
                let sk = self.tol.atol + self.tol.rtol * y[i].norm().max(yn[i].norm());
                err = f64::max(err, e.norm() / sk);
            }
            if !err.is_finite() {
                return Err(Error::NonFinite { context: format!("integrator error estimate at t = {t:e}") });
            }
            let mut fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            if err <= 1.0 {
                if reject {
                    fac = fac.min(1.0);
                }
                // continuous-output coefficients
                for i in 0..n {
                    let ydiff = yn[i] - y[i];
                    let bspl = k1[i] * h - ydiff;
                    self.rcont[0][i] = y[i];
                    self.rcont[1][i] = ydiff;
                    self.rcont[2][i] = bspl;
                    self.rcont[3][i] = ydiff - k7[i] * h - bspl;
                    self.rcont[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5
                        + k6[i] * D6
                        + k7[i] * D7)
                        * h;
                }
                self.last_t0 = t;
                self.last_h = h;
                std::mem::swap(&mut self.y, &mut self.ynew);
                std::mem::swap(k1, k7);
                self.t = if last { t_end } else { t + h };
                self.h = (h * fac).min(self.h_max);
                if last {
                    // keep the proposed size rather than the truncated final step
                    self.h = self.h.max(h);
                }
                self.accepted += 1;
                return Ok(());
            }
            self.rejected += 1;
            reject = true;
            self.h = h * fac.min(1.0);
        }
    }

    /// Integrates to `t_end` exactly.
    pub fn advance_to<F>(&mut self, f: &mut F, t_end: f64) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        while self.t < t_end {
            self.step(f, t_end)?;
        }
        Ok(())
    }
}
