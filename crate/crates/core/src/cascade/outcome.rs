use crate::dynamics::{evolve_master, expectation, run_ensemble, MasterOptions, QuantumState, TrajectoryOptions};
use crate::error::{Error, Result};

use super::model::{CascadeModel, CascadeSetup, ChannelKind, HERALD, TELECOM_MINUS, TELECOM_PLUS};
use super::pulse::{calibrate_pulse, Calibration};

/// Output photon flux (photons/s) through each output coupler.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxCurves {
    pub times: Vec<f64>,
    pub entangling: Vec<f64>,
    pub heralding: Vec<f64>,
}

fn trapezoid(t: &[f64], y: &[f64], from: f64) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .filter(|(tw, _)| tw[1] > from)
        .map(|(tw, yw)| {
            let a = tw[0].max(from);
            let frac = (a - tw[0]) / (tw[1] - tw[0]);
            let ya = yw[0] + frac * (yw[1] - yw[0]);
            0.5 * (ya + yw[1]) * (tw[1] - a)
        })
        .sum()
}

fn argmax(y: &[f64]) -> usize {
    y.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, v)| if *v > b.1 { (i, *v) } else { b })
        .0
}

impl FluxCurves {
    /// Emitted photon number through the entangling output coupler.
    pub fn entangling_total(&self) -> f64 {
        trapezoid(&self.times, &self.entangling, f64::NEG_INFINITY)
    }

    pub fn heralding_total(&self) -> f64 {
        trapezoid(&self.times, &self.heralding, f64::NEG_INFINITY)
    }

    /// Fraction of the heralding output emitted after `t`.
    pub fn heralding_fraction_after(&self, t: f64) -> f64 {
        trapezoid(&self.times, &self.heralding, t) / self.heralding_total()
    }

    pub fn entangling_peak_time(&self) -> f64 {
        self.times[argmax(&self.entangling)]
    }

    pub fn heralding_peak_time(&self) -> f64 {
        self.times[argmax(&self.heralding)]
    }
}

/// Master-equation output fluxes on `grid`, starting from `initial` (default:
/// the model's initial state) at `grid[0]`.
pub fn flux_curves(model: &CascadeModel, initial: Option<&QuantumState>, grid: &[f64]) -> Result<FluxCurves> {
    let rho0 = initial.cloned().unwrap_or_else(|| model.initial_state());
    let states = evolve_master(model.lindblad(), &rho0, grid, &MasterOptions::default())?;
    let nt = model.number_operator(TELECOM_PLUS)?.add(&model.number_operator(TELECOM_MINUS)?)?;
    let nh = model.number_operator(HERALD)?;
    let c = model.cavities();
    let mut ent = Vec::with_capacity(states.len());
    let mut her = Vec::with_capacity(states.len());
    for s in &states {
        ent.push(2.0 * c.entangling.kappa_oc * expectation(&nt, s)?.re);
        her.push(2.0 * c.heralding.kappa_oc * expectation(&nh, s)?.re);
    }
    Ok(FluxCurves { times: grid.to_vec(), entangling: ent, heralding: her })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossChannel {
    FreeSpace,
    EntanglingParasitic,
    HeraldingParasitic,
    FiberCoupling,
    Other,
}

impl LossChannel {
    pub const ALL: [LossChannel; 5] = [
        LossChannel::FreeSpace,
        LossChannel::EntanglingParasitic,
        LossChannel::HeraldingParasitic,
        LossChannel::FiberCoupling,
        LossChannel::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LossChannel::FreeSpace => "free_space",
            LossChannel::EntanglingParasitic => "entangling_parasitic",
            LossChannel::HeraldingParasitic => "heralding_parasitic",
            LossChannel::FiberCoupling => "fiber_coupling",
            LossChannel::Other => "other",
        }
    }

    fn of(kind: ChannelKind) -> Option<Self> {
        match kind {
            ChannelKind::FreeSpace => Some(LossChannel::FreeSpace),
            ChannelKind::TelecomLoss => Some(LossChannel::EntanglingParasitic),
            ChannelKind::HeraldLoss | ChannelKind::SecondHeraldLoss => Some(LossChannel::HeraldingParasitic),
            _ => None,
        }
    }
}

/// First herald and first telecom emission of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalRecord {
    pub t_herald: f64,
    pub t_telecom: f64,
    /// The first herald photon left through the output coupler.
    pub herald_out: bool,
    /// The first telecom photon left through the output coupler (fiber coupling
    /// is applied as a classical efficiency, not per record).
    pub telecom_out: bool,
    /// Telecom output photons beyond the first.
    pub extra_photons: u32,
    /// Exactly one herald and one telecom output photon.
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArrivalSampleSet {
    pub records: Vec<ArrivalRecord>,
}

impl ArrivalSampleSet {
    /// (herald, telecom) arrival times of successful trajectories.
    pub fn successful_pairs(&self) -> Vec<(f64, f64)> {
        self.records.iter().filter(|r| r.success).map(|r| (r.t_herald, r.t_telecom)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    pub trajectories: usize,
    /// Fraction of trajectories with exactly one herald and one telecom output photon.
    pub raw_success: f64,
    /// `raw_success` times the fiber efficiency.
    pub p_ht: f64,
    pub p_ht_stderr: f64,
    /// Each failure charged to its first loss event; sums to `1 − p_ht`.
    pub losses: Vec<(LossChannel, f64, f64)>,
    pub arrivals: ArrivalSampleSet,
}

impl CascadeOutcome {
    pub fn loss(&self, channel: LossChannel) -> f64 {
        self.losses.iter().find(|l| l.0 == channel).map_or(0.0, |l| l.1)
    }

    pub fn total(&self) -> f64 {
        self.p_ht + self.losses.iter().map(|l| l.1).sum::<f64>()
    }
}

pub const MIN_TRAJECTORIES: usize = 1000;

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Monte Carlo herald/telecom success probability and loss budget.
pub fn success_probability(model: &CascadeModel, n_traj: usize, seed: u64) -> Result<CascadeOutcome> {
    if n_traj < MIN_TRAJECTORIES {
        return Err(Error::TooFewSamples { required: MIN_TRAJECTORIES, got: n_traj });
    }
    let records = run_ensemble(
        model.lindblad(),
        &model.initial_state(),
        model.window(),
        n_traj,
        seed,
        &TrajectoryOptions::default(),
    )?;
    let kinds = model.channel_kinds();
    let t0 = model.window().0;
    let mut successes = 0usize;
    let mut charged = [0usize; 5];
    let mut arrivals = Vec::new();
    for rec in &records {
        let count = |k: ChannelKind| rec.jumps.iter().filter(|j| kinds[j.channel] == k).count();
        let n_h = count(ChannelKind::HeraldOutput);
        let n_t = count(ChannelKind::TelecomOutput);
        let success = n_h == 1 && n_t == 1;
        if success {
            successes += 1;
        } else {
            let first = rec.jumps.iter().find_map(|j| LossChannel::of(kinds[j.channel]));
            let slot = LossChannel::ALL.iter().position(|c| Some(*c) == first).unwrap_or(4);
            charged[slot] += 1;
        }
        let first_of = |a: ChannelKind, b: ChannelKind| {
            rec.jumps.iter().find(|j| kinds[j.channel] == a || kinds[j.channel] == b)
        };
        if let (Some(h), Some(t)) = (
            first_of(ChannelKind::HeraldOutput, ChannelKind::HeraldLoss),
            first_of(ChannelKind::TelecomOutput, ChannelKind::TelecomLoss),
        ) {
            arrivals.push(ArrivalRecord {
                t_herald: h.time - t0,
                t_telecom: t.time - t0,
                herald_out: kinds[h.channel] == ChannelKind::HeraldOutput,
                telecom_out: kinds[t.channel] == ChannelKind::TelecomOutput,
                extra_photons: n_t.saturating_sub(1) as u32,
                success,
            });
        }
    }
    let n = n_traj;
    let raw = successes as f64 / n as f64;
    let eta = model.cavities().fiber_efficiency;
    let mut losses: Vec<(LossChannel, f64, f64)> = LossChannel::ALL
        .iter()
        .zip(charged)
        .map(|(c, k)| {
            let p = k as f64 / n as f64;
            (*c, p, binomial_se(p, n))
        })
        .collect();
    losses[3] = (LossChannel::FiberCoupling, (1.0 - eta) * raw, (1.0 - eta) * binomial_se(raw, n));
    Ok(CascadeOutcome {
        trajectories: n,
        raw_success: raw,
        p_ht: eta * raw,
        p_ht_stderr: eta * binomial_se(raw, n),
        losses,
        arrivals: ArrivalSampleSet { records: arrivals },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub fwhm: f64,
    pub calibration: Calibration,
    pub outcome: CascadeOutcome,
}

/// Calibrates and simulates every pulse width with the same seed.
pub fn sweep_fwhm(setup: &CascadeSetup, fwhms: &[f64], n_traj: usize, seed: u64) -> Result<Vec<SweepPoint>> {
    fwhms
        .iter()
        .map(|&fwhm| {
            let calibration = calibrate_pulse(setup, fwhm)?;
            let model = setup.build(&calibration.pulse)?;
            Ok(SweepPoint { fwhm, calibration, outcome: success_probability(&model, n_traj, seed)? })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiphotonEstimate {
    /// Trajectories with at least one herald output photon.
    pub heralded: usize,
    /// Heralded trajectories with two or more telecom output photons.
    pub multi: usize,
    pub fraction: f64,
    /// Wilson 95 % interval.
    pub ci95: (f64, f64),
}

fn wilson(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = k as f64 / nf;
    let den = 1.0 + z * z / nf;
    let mid = (p + z * z / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / den;
    ((mid - half).max(0.0), (mid + half).min(1.0))
}

/// Fraction of heralded trajectories that also emitted more than one telecom photon.
pub fn multiphoton_fraction(model: &CascadeModel, n_traj: usize, seed: u64) -> Result<MultiphotonEstimate> {
    if n_traj < MIN_TRAJECTORIES {
        return Err(Error::TooFewSamples { required: MIN_TRAJECTORIES, got: n_traj });
    }
    let which = model.space().index_of(TELECOM_PLUS).expect("telecom mode");
    if model.space().factors()[which].1 < 3 {
        return Err(Error::invalid("telecom_photons", "multi-photon counting needs a truncation of at least 2"));
    }
    let records = run_ensemble(
        model.lindblad(),
        &model.initial_state(),
        model.window(),
        n_traj,
        seed,
        &TrajectoryOptions::default(),
    )?;
    let kinds = model.channel_kinds();
    let (mut heralded, mut multi) = (0, 0);
    for rec in &records {
        let count = |k: ChannelKind| rec.jumps.iter().filter(|j| kinds[j.channel] == k).count();
        if count(ChannelKind::HeraldOutput) >= 1 {
            heralded += 1;
            if count(ChannelKind::TelecomOutput) >= 2 {
                multi += 1;
            }
        }
    }
    if heralded == 0 {
        return Err(Error::ZeroProbability("no heralded trajectories".into()));
    }
    Ok(MultiphotonEstimate {
        heralded,
        multi,
        fraction: multi as f64 / heralded as f64,
        ci95: wilson(multi, heralded),
    })
}
