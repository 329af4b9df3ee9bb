use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_probability, Error, Result};
use crate::rng::{self, geometric};

/// What happens to the rest of the chain after a failed swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Discard every link and start over.
    Restart,
    /// Only the two segments consumed by the failed swap are lost.
    Keep,
}

/// Processing order of same-level swaps within one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapOrder {
    #[default]
    LeftFirst,
    RightFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub runs: usize,
    pub seed: u64,
    pub bootstrap_resamples: usize,
    pub swap_order: SwapOrder,
}

impl McOptions {
    pub fn new(runs: usize, seed: u64) -> Self {
        Self {
            runs,
            seed,
            bootstrap_resamples: 1000,
            swap_order: SwapOrder::LeftFirst,
        }
    }
}

/// Outcome of one simulated chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainRun {
    /// Cycle in which the end-to-end pair was delivered (first cycle is 1).
    pub cycles: u64,
    /// Cycles between the earliest surviving link creation and delivery, inclusive.
    pub storage: u64,
}

/// Sample mean with its standard error and a percentile-bootstrap 95 % interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub runs: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl McEstimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci95.1 - self.ci95.0)
    }
}

struct Chain {
    n: usize,
    ready_at: Vec<u64>,
    entangled: Vec<bool>,
    created: Vec<u64>,
    /// `joined[k]`: the swap at interior node `k` (between links k−1 and k) has succeeded.
    joined: Vec<bool>,
}

impl Chain {
    fn new<R: Rng>(n: usize, p_e: f64, rng: &mut R) -> Self {
        Self {
            n,
            ready_at: (0..n).map(|_| geometric(rng, p_e)).collect(),
            entangled: vec![false; n],
            created: vec![0; n],
            joined: vec![false; n],
        }
    }

    fn next_event(&self) -> u64 {
        (0..self.n).filter(|i| !self.entangled[*i]).map(|i| self.ready_at[i]).min().unwrap_or(u64::MAX)
    }

    fn complete(&self, from: usize, to: usize) -> bool {
        (from..to).all(|i| self.entangled[i]) && (from + 1..to).all(|k| self.joined[k])
    }

    fn reset<R: Rng>(&mut self, from: usize, to: usize, cycle: u64, p_e: f64, rng: &mut R) {
        for i in from..to {
            self.entangled[i] = false;
            self.ready_at[i] = cycle.saturating_add(geometric(rng, p_e));
        }
        for k in from + 1..to {
            self.joined[k] = false;
        }
    }

    fn storage(&self, cycle: u64) -> u64 {
        cycle - self.created.iter().min().copied().unwrap_or(cycle) + 1
    }
}

/// Simulate one chain of `n` links (a power of two) until delivery.
///
/// Swaps are nested: the node between links `k−1` and `k` joins two blocks of
/// `2^tz(k)` links, so each level waits for the level below. All swaps that
/// become possible in a cycle are attempted in that same cycle.
pub fn simulate_chain<R: Rng>(n: usize, p_e: f64, p_es: f64, strategy: Strategy, order: SwapOrder, rng: &mut R) -> ChainRun {
    let mut chain = Chain::new(n, p_e, rng);
    let levels = n.trailing_zeros();
    loop {
        let cycle = chain.next_event();
        for i in 0..n {
            if !chain.entangled[i] && chain.ready_at[i] == cycle {
                chain.entangled[i] = true;
                chain.created[i] = cycle;
            }
        }
        match strategy {
            Strategy::Restart => {
                if chain.entangled.iter().all(|e| *e) {
                    if (1..n).all(|_| rng.gen::<f64>() < p_es) {
                        return ChainRun {
                            cycles: cycle,
                            storage: chain.storage(cycle),
                        };
                    }
                    chain.reset(0, n, cycle, p_e, rng);
                }
            }
            Strategy::Keep => {
                for level in 0..levels {
                    let half = 1usize << level;
                    let mut nodes: Vec<usize> = (half..n).step_by(2 * half).collect();
                    if order == SwapOrder::RightFirst {
                        nodes.reverse();
                    }
                    for k in nodes {
                        if chain.joined[k] || !chain.complete(k - half, k) || !chain.complete(k, k + half) {
                            continue;
                        }
                        if rng.gen::<f64>() < p_es {
                            chain.joined[k] = true;
                        } else {
                            chain.reset(k - half, k + half, cycle, p_e, rng);
                        }
                    }
                }
                if chain.complete(0, n) {
                    return ChainRun {
                        cycles: cycle,
                        storage: chain.storage(cycle),
                    };
                }
            }
        }
    }
}

fn check_inputs(n: u32, p_e: f64, p_es: f64, opts: &McOptions) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("links", format!("{n} is not a power of two")));
    }
    check_probability("p_e", p_e)?;
    check_probability("p_es", p_es)?;
    if p_e == 0.0 {
        return Err(Error::ZeroProbability("attempt success probability is 0".into()));
    }
    if p_es == 0.0 && n > 1 {
        return Err(Error::ZeroProbability("swap success probability is 0".into()));
    }
    if opts.runs < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: opts.runs,
        });
    }
    Ok(())
}

/// Independent runs, one random stream per run index.
pub fn sample_runs(n: u32, p_e: f64, p_es: f64, strategy: Strategy, opts: &McOptions) -> Result<Vec<ChainRun>> {
    check_inputs(n, p_e, p_es, opts)?;
    Ok((0..opts.runs as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(opts.seed, i);
            simulate_chain(n as usize, p_e, p_es, strategy, opts.swap_order, &mut r)
        })
        .collect())
}

/// Mean, standard error and percentile-bootstrap interval of `values`.
pub fn estimate(values: &[f64], resamples: usize, seed: u64) -> Result<McEstimate> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: values.len(),
        });
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let stderr = (var / n as f64).sqrt();
    let ci95 = if resamples >= 2 {
        // bootstrap streams are offset so they never coincide with run streams
        let mut means: Vec<f64> = (0..resamples as u64)
            .into_par_iter()
            .map(|b| {
                let mut r = rng::stream(seed ^ 0x5eed_b007, b);
                (0..n).map(|_| values[r.gen_range(0..n)]).sum::<f64>() / n as f64
            })
            .collect();
        means.sort_by(f64::total_cmp);
        let pick = |q: f64| means[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
        (pick(0.025), pick(0.975))
    } else {
        (mean - 1.96 * stderr, mean + 1.96 * stderr)
    };
    Ok(McEstimate {
        runs: n,
        mean,
        stderr,
        ci95,
    })
}

/// Sampled mean number of cycles until delivery.
pub fn attempts_mc(n: u32, p_e: f64, p_es: f64, strategy: Strategy, opts: &McOptions) -> Result<McEstimate> {
    let runs = sample_runs(n, p_e, p_es, strategy, opts)?;
    let v: Vec<f64> = runs.iter().map(|r| r.cycles as f64).collect();
    estimate(&v, opts.bootstrap_resamples, opts.seed)
}

/// Sampled mean storage cycles.
pub fn storage_mc(n: u32, p_e: f64, p_es: f64, strategy: Strategy, opts: &McOptions) -> Result<McEstimate> {
    let runs = sample_runs(n, p_e, p_es, strategy, opts)?;
    let v: Vec<f64> = runs.iter().map(|r| r.storage as f64).collect();
    estimate(&v, opts.bootstrap_resamples, opts.seed)
}

pub fn attempts_keep(n: u32, p_e: f64, p_es: f64, opts: &McOptions) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::invalid("links", "keep strategy needs at least two links"));
    }
    attempts_mc(n, p_e, p_es, Strategy::Keep, opts)
}

pub fn storage_keep(n: u32, p_e: f64, p_es: f64, opts: &McOptions) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::invalid("links", "keep strategy needs at least two links"));
    }
    storage_mc(n, p_e, p_es, Strategy::Keep, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_success_finishes_in_one_cycle() {
        let mut r = rng::stream(1, 0);
        for s in [Strategy::Restart, Strategy::Keep] {
            let run = simulate_chain(8, 1.0, 1.0, s, SwapOrder::LeftFirst, &mut r);
            assert_eq!(run, ChainRun { cycles: 1, storage: 1 });
        }
    }

    #[test]
    fn single_link_is_geometric() {
        let opts = McOptions::new(200_000, 3);
        let e = attempts_mc(1, 0.1, 0.5, Strategy::Keep, &opts).unwrap();
        assert!((e.mean - 10.0).abs() < 3.0 * e.stderr, "{e:?}");
        assert!(e.ci95.0 < e.mean && e.mean < e.ci95.1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let opts = McOptions::new(10, 0);
        assert!(attempts_mc(3, 0.1, 0.5, Strategy::Keep, &opts).is_err());
        assert!(attempts_mc(2, 0.0, 0.5, Strategy::Keep, &opts).is_err());
        assert!(attempts_keep(1, 0.1, 0.5, &opts).is_err());
        assert!(attempts_mc(2, 0.1, 0.5, Strategy::Keep, &McOptions::new(1, 0)).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let opts = McOptions::new(5000, 17);
        let a = sample_runs(4, 0.05, 0.4, Strategy::Keep, &opts).unwrap();
        let b = sample_runs(4, 0.05, 0.4, Strategy::Keep, &opts).unwrap();
        assert_eq!(a, b);
    }
}
