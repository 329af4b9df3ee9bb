//! Repeater-chain rates and memory storage times.
//!
//! A chain of total length `L` is split into `N` elementary links of length
//! `L0 = L/N`. Time advances in cycles of `L0/c_f + τ`; in each cycle every
//! unentangled link attempts heralded entanglement with probability `p_e`, and
//! adjacent entangled segments are joined by swaps that succeed with `p_es`.

mod chain;

pub use chain::{
    attempts_keep, attempts_mc, estimate, sample_runs, simulate_chain, storage_keep, storage_mc, ChainRun, McEstimate,
    McOptions, Strategy, SwapOrder,
};

use crate::error::{check_positive, check_probability, Error, Result};

/// Elementary-link parameters. Lengths in km, `fiber_speed` in km/s, `latency` in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub link_length: f64,
    pub attenuation_length: f64,
    pub fiber_speed: f64,
    pub latency: f64,
    pub p_ht: f64,
    pub eta_h: f64,
    pub eta_t: f64,
    pub swap_ratio: f64,
    pub p_p: f64,
}

impl LinkParams {
    /// Default parameter set at the given elementary-link length.
    pub fn reference(link_length: f64) -> Self {
        Self {
            link_length,
            attenuation_length: 22.0,
            fiber_speed: 2e5,
            latency: 100e-6,
            p_ht: 0.53,
            eta_h: 0.8,
            eta_t: 0.8,
            swap_ratio: 0.61,
            p_p: 0.8,
        }
    }

    pub fn with_link_length(mut self, link_length: f64) -> Self {
        self.link_length = link_length;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.link_length >= 0.0) || !self.link_length.is_finite() {
            return Err(Error::invalid("link_length", format!("{} must be non-negative", self.link_length)));
        }
        check_positive("attenuation_length", self.attenuation_length)?;
        check_positive("fiber_speed", self.fiber_speed)?;
        check_positive("latency", self.latency)?;
        check_probability("p_ht", self.p_ht)?;
        check_probability("eta_h", self.eta_h)?;
        check_probability("eta_t", self.eta_t)?;
        check_probability("swap_ratio", self.swap_ratio)?;
        check_probability("p_p", self.p_p)?;
        Ok(())
    }

    /// Probability of entangling one elementary link per attempt. Only two of
    /// the four Bell states are resolved by the photonic measurement, hence ½.
    pub fn p_e(&self) -> f64 {
        0.5 * (self.p_ht * self.eta_h * self.eta_t).powi(2) * (-self.link_length / self.attenuation_length).exp()
    }

    /// Swap success probability.
    pub fn p_es(&self) -> f64 {
        self.swap_ratio * self.p_p * self.eta_h
    }

    /// Duration of one attempt cycle in s.
    pub fn cycle_time(&self) -> f64 {
        self.link_length / self.fiber_speed + self.latency
    }
}

/// Expected number of cycles until all of `n` independent geometric processes
/// with success probability `p` have succeeded.
pub fn z_n(n: u32, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one process"));
    }
    check_probability("p", p)?;
    if p == 0.0 {
        return Err(Error::ZeroProbability("attempt success probability is 0".into()));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let lq = (-p).ln_1p();
    // Σ C(n,j)(−1)^{j+1}/(1−q^j); 1−q^j via expm1 to keep precision for small p
    let mut binom = 1.0f64;
    let mut sum = 0.0;
    for j in 1..=n {
        binom *= (n - j + 1) as f64 / j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binom / -(j as f64 * lq).exp_m1();
    }
    Ok(sum)
}

fn check_links(n: u32) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid("links", format!("{n} is not a power of two")));
    }
    Ok(())
}

/// Expected cycles with the restart strategy: any failed swap discards the
/// whole chain.
pub fn attempts_restart(n: u32, p_e: f64, p_es: f64) -> Result<f64> {
    check_links(n)?;
    check_probability("p_es", p_es)?;
    if p_es == 0.0 && n > 1 {
        return Err(Error::ZeroProbability("swap success probability is 0".into()));
    }
    Ok(z_n(n, p_e)? / p_es.powi(n as i32 - 1))
}

/// Expected storage cycles with the restart strategy.
pub fn storage_restart(n: u32, p_e: f64) -> Result<f64> {
    check_links(n)?;
    if n == 1 {
        return Ok(1.0);
    }
    Ok(z_n(n - 1, p_e)? + 1.0)
}

/// Mean time per delivered pair and the resulting rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub p_e: f64,
    pub p_es: f64,
    pub attempts: f64,
    pub attempts_ci: Option<(f64, f64)>,
    pub mean_time: f64,
    pub rate: f64,
}

impl RateReport {
    /// Rate interval implied by the attempt interval.
    pub fn rate_ci(&self, params: &LinkParams) -> Option<(f64, f64)> {
        self.attempts_ci
            .map(|(lo, hi)| (1.0 / (hi * params.cycle_time()), 1.0 / (lo * params.cycle_time())))
    }
}

/// `⟨T⟩ = ⟨n⟩·(L0/c_f + τ)`.
pub fn avg_time(attempts: f64, params: &LinkParams) -> Result<(f64, f64)> {
    check_positive("attempts", attempts)?;
    params.validate()?;
    let t = attempts * params.cycle_time();
    Ok((t, 1.0 / t))
}

/// Analytic restart-strategy rate for `n` links over total distance `distance` (km).
pub fn restart_rate(n: u32, distance: f64, base: &LinkParams) -> Result<RateReport> {
    check_links(n)?;
    let params = base.with_link_length(distance / n as f64);
    params.validate()?;
    let (p_e, p_es) = (params.p_e(), params.p_es());
    let attempts = attempts_restart(n, p_e, p_es)?;
    let (mean_time, rate) = avg_time(attempts, &params)?;
    Ok(RateReport {
        p_e,
        p_es,
        attempts,
        attempts_ci: None,
        mean_time,
        rate,
    })
}

/// Monte Carlo rate for `n` links under `strategy`.
pub fn mc_rate(n: u32, distance: f64, base: &LinkParams, strategy: Strategy, opts: &McOptions) -> Result<RateReport> {
    check_links(n)?;
    let params = base.with_link_length(distance / n as f64);
    params.validate()?;
    let (p_e, p_es) = (params.p_e(), params.p_es());
    let est = chain::attempts_mc(n, p_e, p_es, strategy, opts)?;
    let (mean_time, rate) = avg_time(est.mean, &params)?;
    Ok(RateReport {
        p_e,
        p_es,
        attempts: est.mean,
        attempts_ci: Some(est.ci95),
        mean_time,
        rate,
    })
}

/// Storage time in s for a chain, with its interval when sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageReport {
    pub cycles: f64,
    pub cycles_ci: Option<(f64, f64)>,
    pub time: f64,
    pub time_ci: Option<(f64, f64)>,
}

impl StorageReport {
    fn new(cycles: f64, ci: Option<(f64, f64)>, params: &LinkParams) -> Self {
        let ct = params.cycle_time();
        Self {
            cycles,
            cycles_ci: ci,
            time: cycles * ct,
            time_ci: ci.map(|(a, b)| (a * ct, b * ct)),
        }
    }
}

/// Analytic restart storage time.
pub fn restart_storage(n: u32, distance: f64, base: &LinkParams) -> Result<StorageReport> {
    check_links(n)?;
    let params = base.with_link_length(distance / n as f64);
    params.validate()?;
    let m = storage_restart(n, params.p_e())?;
    Ok(StorageReport::new(m, None, &params))
}

/// Sampled storage time.
pub fn mc_storage(n: u32, distance: f64, base: &LinkParams, strategy: Strategy, opts: &McOptions) -> Result<StorageReport> {
    check_links(n)?;
    let params = base.with_link_length(distance / n as f64);
    params.validate()?;
    let est = storage_mc(n, params.p_e(), params.p_es(), strategy, opts)?;
    Ok(StorageReport::new(est.mean, Some(est.ci95), &params))
}

/// Distance in `[lo, hi]` where `f` changes sign, by bisection to `tol`.
pub fn crossover<F>(lo: f64, hi: f64, tol: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Unreachable(format!("no sign change between {lo} and {hi}")));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_n_closed_cases() {
        assert!((z_n(1, 0.2).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(z_n(3, 1.0).unwrap(), 1.0);
        assert!((z_n(2, 0.5).unwrap() - 8.0 / 3.0).abs() < 1e-9);
        assert!(z_n(2, 0.0).is_err());
    }

    #[test]
    fn z_n_matches_tail_sum() {
        // E[max] = Σ_{k≥0} P(max > k) = Σ_k 1 − (1 − q^k)^n
        for (n, p) in [(4u32, 0.01), (8, 0.003), (16, 0.05)] {
            let q: f64 = 1.0 - p;
            let tail: f64 = (0..200_000).map(|k| 1.0 - (1.0 - q.powi(k)).powi(n as i32)).sum();
            let z = z_n(n, p).unwrap();
            assert!((z / tail - 1.0).abs() < 1e-9, "{n} {p}: {z} vs {tail}");
        }
    }

    #[test]
    fn link_probabilities() {
        let p = LinkParams::reference(50.0);
        assert!((p.p_e() - 0.00593).abs() < 1e-5);
        assert!((p.p_es() - 0.3904).abs() < 1e-12);
        let mut ideal = LinkParams::reference(0.0);
        ideal.p_ht = 1.0;
        ideal.eta_h = 1.0;
        ideal.eta_t = 1.0;
        assert_eq!(ideal.p_e(), 0.5);
        ideal.eta_t = 0.0;
        assert_eq!(ideal.p_e(), 0.0);
    }

    #[test]
    fn cycle_time_and_rate() {
        let p = LinkParams::reference(80.0);
        assert!((p.cycle_time() - 0.5e-3).abs() < 1e-15);
        let (t, r) = avg_time(1.0, &LinkParams::reference(0.0)).unwrap();
        assert!((t - 100e-6).abs() < 1e-18 && (r * t - 1.0).abs() < 1e-12);
        let (t2, _) = avg_time(2.0, &p).unwrap();
        assert!((t2 - 2.0 * p.cycle_time()).abs() < 1e-15);
    }

    #[test]
    fn restart_formulas() {
        let p_e = LinkParams::reference(50.0).p_e();
        assert!((attempts_restart(1, p_e, 0.3).unwrap() - 1.0 / p_e).abs() < 1e-9);
        assert!((attempts_restart(2, 0.00593, 0.3904).unwrap() - 647.7).abs() < 0.5);
        assert!((attempts_restart(4, p_e, 1.0).unwrap() - z_n(4, p_e).unwrap()).abs() < 1e-9);
        assert!((storage_restart(2, p_e).unwrap() - (1.0 / p_e + 1.0)).abs() < 1e-9);
        assert!(attempts_restart(3, p_e, 0.5).is_err());
    }
}
