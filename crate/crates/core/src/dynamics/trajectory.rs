use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use super::model::LindbladModel;
use super::ode::{Dopri5, Tolerances};
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryOptions {
    pub tolerances: Tolerances,
    /// Jump times are located to within this many seconds.
    pub jump_time_tol: f64,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            jump_time_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub jumps: Vec<JumpEvent>,
    pub final_state: QuantumState,
    pub stream: u64,
}

impl TrajectoryRecord {
    pub fn count(&self, channel: usize) -> usize {
        self.jumps.iter().filter(|j| j.channel == channel).count()
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// One Monte Carlo wave-function trajectory over `interval`, drawing from
/// stream `stream` of `seed`.
pub fn run_trajectory(
    model: &LindbladModel,
    psi0: &QuantumState,
    interval: (f64, f64),
    seed: u64,
    stream: u64,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryRecord> {
    let space = model.space();
    if psi0.space() != space {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi0.space().dim(),
        });
    }
    let psi = psi0
        .amplitudes()
        .ok_or_else(|| Error::invalid("psi0", "trajectories need a pure initial state"))?;
    let (t0, t1) = interval;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::invalid("interval", "need finite t0 < t1"));
    }

    let n = space.dim();
    let mut rng = rng::stream(seed, stream);
    let mut rhs = |t: f64, y: &[C64], out: &mut [C64]| model.schrodinger_rhs(t, y, out);
    let mut stepper = Dopri5::new(t0, psi.to_vec(), opts.tolerances, model.max_step());
    let mut jumps: Vec<JumpEvent> = Vec::new();
    let mut threshold: f64 = rng.gen();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let mut lpsi = vec![C64::new(0.0, 0.0); n];
    let mut exhausted = model.channels().is_empty();

    while stepper.time() < t1 {
        stepper.step(&mut rhs, t1)?;
        let end_norm = norm_sqr(stepper.state());
        if !end_norm.is_finite() {
            return Err(Error::NonFinite { context: format!("in trajectory state at t = {:e} s", stepper.time()) });
        }
        if exhausted || end_norm > threshold {
            continue;
        }
        // Bracket the crossing inside the last step; the norm is non-increasing.
        let dense = stepper.dense();
        let (mut lo, mut hi) = (dense.start(), dense.end());
        while hi - lo > opts.jump_time_tol {
            let mid = 0.5 * (lo + hi);
            dense.eval(mid, &mut buf);
            if norm_sqr(&buf) > threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut tj = hi;
        if let Some(last) = jumps.last() {
            if tj <= last.time {
                tj = last.time + opts.jump_time_tol;
            }
        }
        dense.eval(tj, &mut buf);

        let weights: Vec<f64> = (0..model.channels().len())
            .map(|k| {
                lpsi.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                model.jump_op(k).apply_add(&buf, C64::new(1.0, 0.0), &mut lpsi);
                norm_sqr(&lpsi)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let norm = norm_sqr(&buf);
        if !(total > 1e-300) || !(norm > 1e-300) {
            // No channel can fire any more: all emission probability is spent.
            exhausted = true;
            continue;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut channel = weights.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            if pick < *w {
                channel = k;
                break;
            }
            pick -= w;
        }
        lpsi.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        model.jump_op(channel).apply_add(&buf, C64::new(1.0, 0.0), &mut lpsi);
        let s = 1.0 / weights[channel].sqrt();
        lpsi.iter_mut().for_each(|z| *z *= s);
        jumps.push(JumpEvent {
            time: tj,
            channel,
            label: model.channels()[channel].label.clone(),
        });
        stepper.reset(tj, &lpsi);
        threshold = rng.gen();
    }

    let mut fin = stepper.state().to_vec();
    let nn = norm_sqr(&fin).sqrt();
    if !(nn > 0.0) {
        return Err(Error::NonFinite { context: "(vanishing final norm)".into() });
    }
    fin.iter_mut().for_each(|z| *z /= nn);
    Ok(TrajectoryRecord {
        jumps,
        final_state: QuantumState::pure_normalized(space, fin)?,
        stream,
    })
}

/// Unnormalised state under the effective non-Hermitian Hamiltonian alone.
/// Its squared norm is the probability that no jump occurred on `interval`.
pub fn evolve_no_jump(
    model: &LindbladModel,
    psi0: &QuantumState,
    interval: (f64, f64),
    tolerances: Tolerances,
) -> Result<Vec<C64>> {
    let psi = psi0
        .amplitudes()
        .ok_or_else(|| Error::invalid("psi0", "need a pure initial state"))?;
    if psi0.space() != model.space() {
        return Err(Error::DimensionMismatch {
            expected: model.space().dim(),
            found: psi0.space().dim(),
        });
    }
    let mut rhs = |t: f64, y: &[C64], out: &mut [C64]| model.schrodinger_rhs(t, y, out);
    let mut stepper = Dopri5::new(interval.0, psi.to_vec(), tolerances, model.max_step());
    stepper.advance_to(&mut rhs, interval.1)?;
    let y = stepper.state().to_vec();
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { context: "in no-jump evolution".into() });
    }
    Ok(y)
}

/// `n` trajectories on streams `0..n`, returned in stream order.
pub fn run_ensemble(
    model: &LindbladModel,
    psi0: &QuantumState,
    interval: (f64, f64),
    n: usize,
    seed: u64,
    opts: &TrajectoryOptions,
) -> Result<Vec<TrajectoryRecord>> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one trajectory"));
    }
    (0..n as u64)
        .into_par_iter()
        .map(|i| run_trajectory(model, psi0, interval, seed, i, opts))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub label: String,
    pub jump_times: Vec<f64>,
    pub total: u64,
    /// Mean number of jumps per trajectory.
    pub mean: f64,
    /// Standard error of `mean`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub trajectories: usize,
    pub channels: Vec<ChannelStats>,
}

impl EnsembleSummary {
    pub fn from_records(model: &LindbladModel, records: &[TrajectoryRecord]) -> Self {
        let n = records.len();
        let channels = model
            .channels()
            .iter()
            .enumerate()
            .map(|(k, ch)| {
                let counts: Vec<f64> = records.iter().map(|r| r.count(k) as f64).collect();
                let total = counts.iter().sum::<f64>();
                let mean = if n > 0 { total / n as f64 } else { 0.0 };
                let var = if n > 1 {
                    counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64
                } else {
                    0.0
                };
                ChannelStats {
                    label: ch.label.clone(),
                    jump_times: records
                        .iter()
                        .flat_map(|r| r.jumps.iter().filter(|j| j.channel == k).map(|j| j.time))
                        .collect(),
                    total: total as u64,
                    mean,
                    stderr: (var / n.max(1) as f64).sqrt(),
                }
            })
            .collect();
        Self { trajectories: n, channels }
    }

    pub fn channel(&self, label: &str) -> Option<&ChannelStats> {
        self.channels.iter().find(|c| c.label == label)
    }
}

/// Runs `n` trajectories and reduces them per channel.
pub fn batch_trajectories(
    model: &LindbladModel,
    psi0: &QuantumState,
    interval: (f64, f64),
    n: usize,
    seed: u64,
    opts: &TrajectoryOptions,
) -> Result<EnsembleSummary> {
    let records = run_ensemble(model, psi0, interval, n, seed, opts)?;
    Ok(EnsembleSummary::from_records(model, &records))
}
