//! Telecom-photon indistinguishability from (herald, telecom) arrival-time samples.
//!
//! A separable Gaussian kernel density estimate of the joint arrival density is
//! sliced at fixed herald times; each slice is read as a transform-limited wave
//! packet with amplitude √p(t), and Hong-Ou-Mandel contrasts are overlaps of
//! those amplitudes.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_positive, Error, Result};
use crate::rng;

/// Grid shared by both time axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        check_positive("step", step)?;
        if !(end > start) {
            return Err(Error::invalid("grid", "end must be after start"));
        }
        Ok(Self { start, step, len: ((end - start) / step).ceil() as usize + 1 })
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.time(i))
    }
}

/// Default grid spacing.
pub const GRID_STEP: f64 = 0.25e-9;
/// Kernels are cut off at this many standard deviations.
const KERNEL_REACH: f64 = 6.0;
pub const MIN_SAMPLES: usize = 100;

/// Kernel standard deviations (herald, telecom) for the given total field decay rates.
pub fn kernel_widths(kappa_t: f64, kappa_h: f64) -> (f64, f64) {
    (1.0 / (6.0 * kappa_h), 1.0 / (6.0 * kappa_t))
}

/// Joint density on `grid × grid`; rows are herald times, columns telecom times.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeEstimate {
    grid: TimeGrid,
    /// Herald and telecom kernel standard deviations (zero for analytic densities).
    widths: (f64, f64),
    density: Vec<f64>,
}

fn gaussian_weights(grid: &TimeGrid, centre: f64, sigma: f64) -> (usize, Vec<f64>) {
    let lo = ((centre - KERNEL_REACH * sigma - grid.start) / grid.step).floor().max(0.0) as usize;
    let hi = (((centre + KERNEL_REACH * sigma - grid.start) / grid.step).ceil().max(0.0) as usize).min(grid.len - 1);
    if lo > hi {
        return (0, Vec::new());
    }
    let w = (lo..=hi)
        .map(|i| {
            let x = (grid.time(i) - centre) / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    (lo, w)
}

impl KdeEstimate {
    /// Kernel estimate from `(t_herald, t_telecom)` samples (s), with kernel
    /// widths 1/(6κ) per axis. Needs at least [`MIN_SAMPLES`] distinct samples.
    pub fn fit(samples: &[(f64, f64)], kappa_t: f64, kappa_h: f64, grid: Option<TimeGrid>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples { required: MIN_SAMPLES, got: samples.len() });
        }
        if samples.iter().all(|s| *s == samples[0]) {
            return Err(Error::DegenerateSamples("all samples coincide".into()));
        }
        Self::fit_any(samples, kernel_widths(kappa_t, kappa_h), grid)
    }

    /// [`KdeEstimate::fit`] without the sample-count checks and with explicit
    /// (herald, telecom) kernel standard deviations.
    pub fn fit_any(samples: &[(f64, f64)], widths: (f64, f64), grid: Option<TimeGrid>) -> Result<Self> {
        check_positive("herald kernel width", widths.0)?;
        check_positive("telecom kernel width", widths.1)?;
        if samples.is_empty() {
            return Err(Error::TooFewSamples { required: 1, got: 0 });
        }
        if samples.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::NonFinite { context: "in arrival samples".into() });
        }
        let grid = match grid {
            Some(g) => g,
            None => {
                let reach = KERNEL_REACH * widths.0.max(widths.1);
                let max = samples.iter().map(|s| s.0.max(s.1)).fold(f64::NEG_INFINITY, f64::max);
                let min = samples.iter().map(|s| s.0.min(s.1)).fold(f64::INFINITY, f64::min);
                TimeGrid::new((min - reach).max(0.0).min(min), max + reach, GRID_STEP)?
            }
        };
        let n = grid.len;
        let mut density = vec![0.0; n * n];
        for &(th, tt) in samples {
            let (r0, wr) = gaussian_weights(&grid, th, widths.0);
            let (c0, wc) = gaussian_weights(&grid, tt, widths.1);
            for (di, a) in wr.iter().enumerate() {
                let row = &mut density[(r0 + di) * n + c0..(r0 + di) * n + c0 + wc.len()];
                for (cell, b) in row.iter_mut().zip(&wc) {
                    *cell += a * b;
                }
            }
        }
        Self::from_density(grid, density).map(|mut k| {
            k.widths = widths;
            k
        })
    }

    /// Wraps a non-negative density given on `grid × grid` (row = herald time)
    /// and normalises it.
    pub fn from_density(grid: TimeGrid, mut density: Vec<f64>) -> Result<Self> {
        let n = grid.len;
        if density.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: density.len() });
        }
        if density.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("density", "must be finite and non-negative"));
        }
        let mass: f64 = density.iter().sum::<f64>() * grid.step * grid.step;
        if !(mass > 0.0) {
            return Err(Error::DegenerateSamples("density vanishes on the grid".into()));
        }
        density.iter_mut().for_each(|v| *v /= mass);
        Ok(Self { grid, widths: (0.0, 0.0), density })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kernel_widths(&self) -> (f64, f64) {
        self.widths
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn at(&self, herald_idx: usize, telecom_idx: usize) -> f64 {
        self.density[herald_idx * self.grid.len + telecom_idx]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.density[i * self.grid.len..(i + 1) * self.grid.len]
    }

    /// ∬ p dt dt on the grid (1 by construction).
    pub fn total(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.step * self.grid.step
    }

    /// Herald-time marginal density.
    pub fn herald_marginal(&self) -> Vec<f64> {
        (0..self.grid.len).map(|i| self.row(i).iter().sum::<f64>() * self.grid.step).collect()
    }

    /// Telecom-time marginal density.
    pub fn telecom_marginal(&self) -> Vec<f64> {
        let n = self.grid.len;
        let mut m = vec![0.0; n];
        for i in 0..n {
            for (acc, v) in m.iter_mut().zip(self.row(i)) {
                *acc += v * self.grid.step;
            }
        }
        m
    }

    /// Normalised telecom envelope given a herald photon at `t_herald`.
    pub fn conditional_envelope(&self, t_herald: f64) -> Result<Envelope> {
        let g = &self.grid;
        let x = (t_herald - g.start) / g.step;
        if !(x >= 0.0 && x <= (g.len - 1) as f64) {
            return Err(Error::OutsideSupport { time: t_herald });
        }
        let i = (x.floor() as usize).min(g.len - 2);
        let f = x - i as f64;
        let marginal = self.herald_marginal();
        let peak = marginal.iter().cloned().fold(0.0, f64::max);
        let m = (1.0 - f) * marginal[i] + f * marginal[i + 1];
        if !(m > 1e-12 * peak) {
            return Err(Error::OutsideSupport { time: t_herald });
        }
        let density: Vec<f64> = self.row(i).iter().zip(self.row(i + 1)).map(|(a, b)| (1.0 - f) * a + f * b).collect();
        Envelope::normalized(*g, density)
    }
}

/// Unit-normalised density over telecom arrival time.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub grid: TimeGrid,
    pub density: Vec<f64>,
}

impl Envelope {
    pub fn normalized(grid: TimeGrid, mut density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.len {
            return Err(Error::DimensionMismatch { expected: grid.len, found: density.len() });
        }
        if density.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("envelope", "must be finite and non-negative"));
        }
        let mass: f64 = density.iter().sum::<f64>() * grid.step;
        if !(mass > 0.0) {
            return Err(Error::DegenerateSamples("empty envelope".into()));
        }
        density.iter_mut().for_each(|v| *v /= mass);
        Ok(Self { grid, density })
    }

    pub fn mean(&self) -> f64 {
        self.grid.times().zip(&self.density).map(|(t, p)| t * p).sum::<f64>() * self.grid.step
    }
}

/// (∫√(p₁p₂) dt)²
pub fn pair_contrast(a: &Envelope, b: &Envelope) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::invalid("envelopes", "must share one time grid"));
    }
    let s: f64 = a.density.iter().zip(&b.density).map(|(p, q)| (p * q).sqrt()).sum::<f64>() * a.grid.step;
    Ok((s * s).min(1.0))
}

pub fn fidelity_from_contrast(c: f64) -> Result<f64> {
    crate::error::check_probability("contrast", c)?;
    Ok(0.5 * (1.0 + c))
}

/// Herald-weighted contrasts, restricted to herald pairs closer than `window`.
struct ContrastTable {
    /// Herald-marginal weights (sum to one) of the rows kept.
    weights: Vec<f64>,
    rows: Vec<usize>,
    /// √ of each kept conditional envelope, times √dt.
    roots: Vec<Vec<f64>>,
    step: f64,
}

impl ContrastTable {
    fn new(kde: &KdeEstimate) -> Self {
        let g = kde.grid;
        let marginal = kde.herald_marginal();
        let peak = marginal.iter().cloned().fold(0.0, f64::max);
        let rows: Vec<usize> = (0..g.len).filter(|&i| marginal[i] > 1e-12 * peak).collect();
        let total: f64 = rows.iter().map(|&i| marginal[i]).sum();
        let weights = rows.iter().map(|&i| marginal[i] / total).collect();
        let roots = rows
            .iter()
            .map(|&i| {
                let norm = marginal[i];
                kde.row(i).iter().map(|p| (p / norm * g.step).sqrt()).collect()
            })
            .collect();
        Self { weights, rows, roots, step: g.step }
    }

    /// (Σ w w C, Σ w w) over pairs with |Δt| ≤ window. A grid pair stands for a
    /// cell of width `step` in Δt and counts with the part of it inside the window.
    fn sums(&self, window: f64) -> (f64, f64) {
        let k = self.rows.len();
        let step = self.step;
        let band = |sep: usize| -> f64 {
            if !window.is_finite() {
                1.0
            } else if sep == 0 {
                (2.0 * window / step).min(1.0)
            } else {
                ((window - (sep as f64 - 0.5) * step) / step).clamp(0.0, 1.0)
            }
        };
        (0..k)
            .into_par_iter()
            .map(|a| {
                let mut num = 0.0;
                let mut den = 0.0;
                for b in a..k {
                    let sep = self.rows[b] - self.rows[a];
                    let f = band(sep);
                    if f == 0.0 {
                        break;
                    }
                    let ov: f64 = if a == b {
                        1.0
                    } else {
                        let s: f64 = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x * y).sum();
                        (s * s).min(1.0)
                    };
                    let w = f * self.weights[a] * self.weights[b] * if a == b { 1.0 } else { 2.0 };
                    num += w * ov;
                    den += w;
                }
                (num, den)
            })
            .collect::<Vec<_>>()
            .into_iter()
            // sequential fold: the result must not depend on work splitting
            .fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1))
    }
}

/// ∬ P(t₁)P(t₂) C(t₁, t₂) over the herald marginal P.
pub fn average_contrast(kde: &KdeEstimate) -> f64 {
    let (num, den) = ContrastTable::new(kde).sums(f64::INFINITY);
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectPoint {
    pub window: f64,
    pub contrast: f64,
    /// Probability that two herald times lie within `window` of each other.
    pub retained: f64,
}

pub fn postselect_tradeoff(kde: &KdeEstimate, windows: &[f64]) -> Result<Vec<PostselectPoint>> {
    let table = ContrastTable::new(kde);
    windows
        .iter()
        .map(|&w| {
            if !(w > 0.0) {
                return Err(Error::invalid("window", "must be positive"));
            }
            let (num, den) = table.sums(w);
            Ok(PostselectPoint { window: w, contrast: num / den, retained: den })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastReport {
    pub contrast: f64,
    pub fidelity: f64,
    /// Bootstrap standard deviation of `contrast`, if requested.
    pub stderr: Option<f64>,
    pub envelopes: Vec<(f64, Envelope)>,
    pub postselection: Vec<PostselectPoint>,
}

/// Average contrast, envelopes at `herald_times` and the post-selection curve.
pub fn contrast_report(kde: &KdeEstimate, herald_times: &[f64], windows: &[f64]) -> Result<ContrastReport> {
    let contrast = average_contrast(kde);
    Ok(ContrastReport {
        contrast,
        fidelity: fidelity_from_contrast(contrast.clamp(0.0, 1.0))?,
        stderr: None,
        envelopes: herald_times
            .iter()
            .map(|&t| Ok((t, kde.conditional_envelope(t)?)))
            .collect::<Result<_>>()?,
        postselection: postselect_tradeoff(kde, windows)?,
    })
}

/// Standard deviation of the average contrast over `resamples` bootstrap
/// resamples of `samples`, each refitted on `grid`.
pub fn bootstrap_contrast(
    samples: &[(f64, f64)],
    kappa_t: f64,
    kappa_h: f64,
    grid: TimeGrid,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if resamples < 2 {
        return Err(Error::invalid("resamples", "need at least two"));
    }
    let values: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(seed, b);
            let draw: Vec<(f64, f64)> = (0..samples.len()).map(|_| samples[r.gen_range(0..samples.len())]).collect();
            KdeEstimate::fit(&draw, kappa_t, kappa_h, Some(grid)).map(|k| average_contrast(&k))
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Ok(var.sqrt())
}
