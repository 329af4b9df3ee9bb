//! End-to-end acceptance suite.
//!
//! Runs every criterion at its stated tolerance and prints one line per
//! criterion, followed by the individual checks. Exits nonzero if any fails.

#[path = "../../core/tests/support/bell_oracle.rs"]
mod bell_oracle;
#[path = "../../core/tests/support/herald_oracle.rs"]
mod herald_oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use qrep_cli::commands::{cascade_setup, cavity, link_params};
use qrep_cli::config::ScenarioConfig;
use qrep_cli::output::Cell;
use qrep_core::cascade::{
    calibrated_model, flux_curves, multiphoton_fraction, success_probability, sweep_fwhm, LossChannel,
};
use qrep_core::dynamics::{batch_trajectories, TrajectoryOptions};
use qrep_core::herald::{degenerate_mode_fidelity, postselected_state, TransitionAmplitudes};
use qrep_core::indist::{bootstrap_contrast, contrast_report, KdeEstimate, TimeGrid, GRID_STEP};
use qrep_core::keyrate::{
    chain_secret_fraction, chain_state, dejmps_purify, error_rates, fidelity_gain_threshold,
    key_rate_benefit_threshold, swap, threshold_fidelity, BellDiagonalState, GateErrorConvention, PurifyAt,
    SwapModel,
};
use qrep_core::repeater::{
    crossover, mc_rate, mc_storage, restart_rate, restart_storage, z_n, LinkParams, McOptions, Strategy,
};
use qrep_core::rng;
use rand::Rng;

const NS: f64 = 1e-9;
const N_TRAJ: usize = 20_000;

/// Checks of one criterion.
#[derive(Default)]
struct Checks(Vec<(bool, String)>);

impl Checks {
    fn add(&mut self, ok: bool, what: String) {
        self.0.push((ok, what));
    }

    /// `|value − target| ≤ tol`.
    fn near(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.add((value - target).abs() <= tol, format!("{name} = {value:.5} (target {target} ± {tol})"));
    }

    /// Relative tolerance.
    fn rel(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.add(
            (value / target - 1.0).abs() <= tol,
            format!("{name} = {value:.5} (target {target} ± {:.0}%)", tol * 100.0),
        );
    }
}

type Criterion = fn(&mut Checks) -> Result<(), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lookup(rows: &[Vec<Cell>], cav: &str, qty: &str) -> f64 {
    rows.iter()
        .find(|r| r[0] == Cell::Text(cav.into()) && r[1] == Cell::Text(qty.into()))
        .and_then(|r| match r[2] {
            Cell::Num(v) => Some(v),
            _ => None,
        })
        .unwrap_or_else(|| panic!("no {cav}/{qty} row"))
}

fn cavity_design(c: &mut Checks) -> Result<(), String> {
    let t = cavity(&ScenarioConfig::default()).map_err(err)?;
    let v = |cav, q| lookup(&t.rows, cav, q);
    for (cav, q, target) in [
        ("heralding", "kappa_oc", 11.9),
        ("heralding", "kappa_loss", 1.5),
        ("entangling", "kappa_oc", 95.0),
        ("entangling", "kappa_loss", 8.0),
        ("heralding", "g", 16.3),
        ("heralding", "g_at_probe_position", 15.1),
        ("entangling", "g", 70.0),
    ] {
        c.rel(&format!("{cav} {q} [MHz2pi]"), v(cav, q), target, 0.03);
    }
    c.rel("heralding waist [um]", v("heralding", "waist"), 7.9, 0.02);
    c.rel("entangling waist [um]", v("entangling", "waist"), 4.8, 0.02);
    c.rel("entangling radius at atom [um]", v("entangling", "radius_at_atom"), 5.3, 0.02);
    c.near("fiber overlap", v("entangling", "fiber_overlap"), 0.96, 0.01);
    c.rel("entangling cooperativity", v("entangling", "cooperativity"), 25.0, 0.10);
    c.rel("heralding cooperativity", v("heralding", "cooperativity"), 3.4, 0.10);
    Ok(())
}

fn cascade_success(c: &mut Checks) -> Result<(), String> {
    let setup = cascade_setup(&ScenarioConfig::default());
    let (m, _) = calibrated_model(&setup, 5.9 * NS).map_err(err)?;
    let o = success_probability(&m, N_TRAJ, 7).map_err(err)?;
    c.near("p_ht at 5.9 ns", o.p_ht, 0.57, 0.05);
    c.near("free-space loss", o.loss(LossChannel::FreeSpace), 0.24, 0.04);
    c.near("entangling parasitic loss", o.loss(LossChannel::EntanglingParasitic), 0.08, 0.04);
    c.near("heralding parasitic loss", o.loss(LossChannel::HeraldingParasitic), 0.07, 0.04);
    let sigma = o.losses.iter().map(|l| l.2 * l.2).sum::<f64>().sqrt().hypot(o.p_ht_stderr);
    c.add(
        (o.total() - 1.0).abs() <= 3.0 * sigma,
        format!("p_ht + losses = {:.15} (1 within 3σ = {:.2e})", o.total(), 3.0 * sigma),
    );
    let widths: Vec<f64> = (5..=10).map(|w| w as f64 * NS).collect();
    let sweep = sweep_fwhm(&setup, &widths, N_TRAJ, 7).map_err(err)?;
    for p in &sweep {
        c.near(&format!("p_ht at {:.0} ns (flat vs 5.9 ns)", p.fwhm / NS), p.outcome.p_ht, o.p_ht, 0.03);
    }
    Ok(())
}

fn flux_lag(c: &mut Checks) -> Result<(), String> {
    let setup = cascade_setup(&ScenarioConfig::default());
    let (m, _) = calibrated_model(&setup, 5.9 * NS).map_err(err)?;
    let (t0, t1) = m.window();
    let grid: Vec<f64> = (0..=4000).map(|i| t0 + (t1 - t0) * i as f64 / 4000.0).collect();
    let f = flux_curves(&m, None, &grid).map_err(err)?;
    let (pt, ph) = (f.entangling_peak_time(), f.heralding_peak_time());
    c.add(ph > pt, format!("herald peak {:.2} ns after telecom peak {:.2} ns", ph / NS, pt / NS));
    let mean = |v: &[f64]| {
        let w: f64 = v.iter().sum();
        grid.iter().zip(v).map(|(t, x)| t * x).sum::<f64>() / w
    };
    let (mt, mh) = (mean(&f.entangling), mean(&f.heralding));
    c.add(mh > mt, format!("herald mean time {:.2} ns after telecom {:.2} ns", mh / NS, mt / NS));
    let late = f.heralding_fraction_after(45.0 * NS);
    c.add(late < 0.03 + 0.01, format!("herald output after 45 ns = {:.2}% (< 3% ± 1 pp)", late * 100.0));
    Ok(())
}

fn contrast(c: &mut Checks) -> Result<(), String> {
    let setup = cascade_setup(&ScenarioConfig::default());
    let (kt, kh) = (setup.cavities.entangling.kappa(), setup.cavities.heralding.kappa());
    let windows = [4.0 * NS, 2.0 * NS, 1.0 * NS, 0.5 * NS, GRID_STEP];
    let mut points = Vec::new();
    for fwhm in [5.9, 15.0, 25.0] {
        let (m, _) = calibrated_model(&setup, fwhm * NS).map_err(err)?;
        let pairs = success_probability(&m, N_TRAJ, 11).map_err(err)?.arrivals.successful_pairs();
        let grid = TimeGrid::new(0.0, m.window().1, GRID_STEP).map_err(err)?;
        let kde = KdeEstimate::fit(&pairs, kt, kh, Some(grid)).map_err(err)?;
        let rep = contrast_report(&kde, &[], &windows).map_err(err)?;
        let se = bootstrap_contrast(&pairs, kt, kh, grid, 50, 11).map_err(err)?;
        c.add(true, format!("C({fwhm} ns) = {:.4} ± {se:.4}", rep.contrast));
        if fwhm == 5.9 {
            c.add(rep.contrast >= 0.95, format!("C at 5.9 ns = {:.4} (≥ 0.95)", rep.contrast));
            let cs: Vec<f64> = rep.postselection.iter().map(|p| p.contrast).collect();
            let rising = cs.windows(2).all(|w| w[1] >= w[0]) && cs[0] >= rep.contrast;
            let narrow = *cs.last().unwrap();
            c.add(
                rising && 1.0 - narrow <= 0.01,
                format!(
                    "shrinking windows {:?} ns give C {:?} (monotone toward 1, 1 − C ≤ 0.01 at one grid step)",
                    windows.iter().map(|w| w / NS).collect::<Vec<_>>(),
                    cs.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
                ),
            );
        }
        points.push((fwhm, rep.contrast, se));
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let gap = a.1 - b.1;
        let sigma = a.2.hypot(b.2);
        c.add(gap > 2.0 * sigma, format!("C({}) − C({}) = {gap:.4} (> 2σ = {:.4})", a.0, b.0, 2.0 * sigma));
    }
    Ok(())
}

fn multiphoton(c: &mut Checks) -> Result<(), String> {
    let mut setup = cascade_setup(&ScenarioConfig::default());
    setup.options.worst_case_recycling = true;
    let (m, _) = calibrated_model(&setup, 5.9 * NS).map_err(err)?;
    let e = multiphoton_fraction(&m, N_TRAJ, 13).map_err(err)?;
    c.add(e.fraction < 0.01, format!("multi-photon fraction = {:.3}% ({}/{})", e.fraction * 100.0, e.multi, e.heralded));
    let (lo, hi) = e.ci95;
    c.add(
        lo <= 0.008 && hi >= 0.001,
        format!("95% CI [{:.3}%, {:.3}%] overlaps [0.1%, 0.8%]", lo * 100.0, hi * 100.0),
    );
    Ok(())
}

fn herald(c: &mut Checks) -> Result<(), String> {
    let two_sig = |x: f64| {
        let p = 10f64.powi(x.abs().log10().floor() as i32 - 1);
        (x / p).round() * p
    };
    for ((a, b, cc), target) in [((-1.0, 3f64.sqrt(), -(6f64.sqrt())), 0.0015), ((-1.0, 1.0, 0.0), 0.029)] {
        let f = degenerate_mode_fidelity(a, b, cc).map_err(err)?;
        let loss = 1.0 - f;
        c.add(
            (two_sig(loss) - target).abs() < 1e-12,
            format!("1 − F({a:.3}, {b:.3}, {cc:.3}) = {:.4}% (two figures: {:.2}%)", loss * 100.0, target * 100.0),
        );
        let s = postselected_state(&TransitionAmplitudes::symmetric(a, b, cc).map_err(err)?).map_err(err)?;
        let explicit = herald_oracle::overlap_fidelity(a, a, b, b, cc, cc);
        c.add(
            (explicit - f).abs() < 1e-12 && (s.fidelity() - f).abs() < 1e-12,
            format!("closed form vs explicit overlap: |Δ| = {:.1e}", (explicit - f).abs()),
        );
    }
    Ok(())
}

fn ratio(n: u32, m: u32, l: f64, base: &LinkParams) -> Result<f64, String> {
    Ok(restart_rate(n, l, base).map_err(err)?.rate / restart_rate(m, l, base).map_err(err)?.rate)
}

fn repeater_rates(c: &mut Checks) -> Result<(), String> {
    let base = link_params(&ScenarioConfig::default());
    let diff = |n, m| move |l: f64| -> qrep_core::Result<f64> { Ok(restart_rate(n, l, &base)?.rate - restart_rate(m, l, &base)?.rate) };
    let be = crossover(10.0, 100.0, 1e-3, diff(2, 1)).map_err(err)?;
    c.near("N=2 vs N=1 break-even [km]", be, 41.0, 3.0);
    c.near("N=2 / N=1 at 100 km", ratio(2, 1, 100.0, &base)?, 4.0, 0.5);
    let over = crossover(60.0, 250.0, 1e-3, diff(4, 2)).map_err(err)?;
    c.near("N=4 restart overtakes N=2 [km]", over, 150.0, 10.0);
    c.near("N=4 / N=1 at 150 km", ratio(4, 1, 150.0, &base)?, 14.0, 2.0);

    let opts = McOptions::new(200_000, 21);
    let keep = mc_rate(4, 200.0, &base, Strategy::Keep, &opts).map_err(err)?;
    let restart = restart_rate(4, 200.0, &base).map_err(err)?;
    c.near("N=4 keep / restart at 200 km", keep.rate / restart.rate, 2.4, 0.3);
    // common random numbers across distances keep the bisection well defined
    let keep_vs_two = |l: f64| -> qrep_core::Result<f64> {
        Ok(mc_rate(4, l, &base, Strategy::Keep, &opts)?.rate - restart_rate(2, l, &base)?.rate)
    };
    let kbe = crossover(40.0, 150.0, 0.05, keep_vs_two).map_err(err)?;
    c.near("N=4 keep vs N=2 break-even [km]", kbe, 82.0, 8.0);
    Ok(())
}

fn storage(c: &mut Checks) -> Result<(), String> {
    let base = link_params(&ScenarioConfig::default());
    let ms = |r: qrep_core::repeater::StorageReport| r.time * 1e3;
    for (l, t) in [(100.0, 59.0), (200.0, 980.0)] {
        c.rel(&format!("N=2 storage at {l} km [ms]"), ms(restart_storage(2, l, &base).map_err(err)?), t, 0.10);
    }
    for (l, t) in [(100.0, 22.0), (200.0, 110.0)] {
        c.rel(&format!("N=4 restart storage at {l} km [ms]"), ms(restart_storage(4, l, &base).map_err(err)?), t, 0.10);
    }
    let mut opts = McOptions::new(1_000_000, 22);
    opts.bootstrap_resamples = 200;
    for (l, t) in [(100.0, 53.0), (200.0, 260.0)] {
        let r = mc_storage(4, l, &base, Strategy::Keep, &opts).map_err(err)?;
        c.rel(&format!("N=4 keep storage at {l} km [ms]"), ms(r), t, 0.10);
        let (lo, hi) = r.cycles_ci.expect("sampled");
        let half = 0.5 * (hi - lo) / r.cycles;
        c.add(half < 0.002, format!("bootstrap half-width at {l} km = {:.3}% of the mean (< 0.2%)", half * 100.0));
    }
    Ok(())
}

fn key_rate(c: &mut Checks) -> Result<(), String> {
    let mut worst = 0.0f64;
    for cc in [0.0, 0.5, 0.9, 0.97, 1.0] {
        for f in [0.25, 0.6, 0.83, 0.95, 1.0] {
            let p = (4.0 * f - 1.0) / 3.0;
            let m = SwapModel::from_bsm_fidelity(f).map_err(err)?;
            let w = chain_state(2, cc, m).map_err(err)?.weights();
            let lam = [
                (1.0 + p + 2.0 * p * cc * cc) / 4.0,
                (1.0 + p - 2.0 * p * cc * cc) / 4.0,
                (1.0 - p) / 4.0,
                (1.0 - p) / 4.0,
            ];
            worst = (0..4).fold(worst, |a, i| a.max((w[i] - lam[i]).abs()));
            for (n, k) in [(2u32, 1), (4, 3)] {
                let e = error_rates(&chain_state(n, cc, m).map_err(err)?).map_err(err)?;
                let exy = (1.0 - p.powi(k) * cc.powi(n as i32)) / 2.0;
                let ez = (1.0 - p.powi(k)) / 2.0;
                worst = worst.max((e.eps_x - exy).abs()).max((e.eps_y - exy).abs()).max((e.eps_z - ez).abs());
            }
        }
    }
    c.add(worst < 1e-12, format!("λ and ε closed forms: max |Δ| = {worst:.1e}"));
    c.near("r(C=0.97, F=0.95, N=2)", chain_secret_fraction(2, 0.97, 0.95).map_err(err)?.raw, 0.497, 0.005);
    for (n, target, f) in [(2u32, 0.0, 0.83), (4, 0.0, 0.95), (2, 0.5, 0.95), (2, 0.25, 0.89), (4, 0.5, 0.99), (4, 0.25, 0.97)] {
        let got = threshold_fidelity(0.97, n, target).map_err(err)?;
        c.near(&format!("threshold F for r = {target}, N={n}"), got, f, 0.005);
    }
    Ok(())
}

fn purification(c: &mut Checks) -> Result<(), String> {
    for (n, target) in [(2u32, 0.04), (4, 0.07)] {
        let vals: Vec<(GateErrorConvention, f64)> = GateErrorConvention::ALL
            .iter()
            .map(|&conv| fidelity_gain_threshold(0.97, n, conv).map(|e| (conv, e)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let ok = vals.iter().any(|(_, e)| (e - target).abs() <= 0.02);
        let shown: Vec<String> = vals.iter().map(|(k, e)| format!("e={}: {:.2}%", k.label(), e * 100.0)).collect();
        c.add(ok, format!("fidelity-gain gate error N={n}: {} (target {:.0}% ± 2 pp, either convention)", shown.join(", "), target * 100.0));
    }
    for (n, target) in [(2u32, 0.55), (4, 0.83)] {
        let mut shown = Vec::new();
        let mut ok = false;
        for (at, name) in [(PurifyAt::EndToEnd, "end-to-end"), (PurifyAt::ElementaryLinks, "elementary links")] {
            match key_rate_benefit_threshold(n, at) {
                Ok(cs) => {
                    ok |= (cs - target).abs() <= 0.05;
                    shown.push(format!("{name}: {cs:.4}"));
                }
                Err(e) => shown.push(format!("{name}: {e}")),
            }
        }
        c.add(ok, format!("key-rate benefit C* N={n}: {} (target {target} ± 0.05)", shown.join(", ")));
    }
    Ok(())
}

fn random_bell(r: &mut impl Rng) -> BellDiagonalState {
    let w: [f64; 4] = std::array::from_fn(|_| r.gen::<f64>() + 1e-3);
    let s: f64 = w.iter().sum();
    BellDiagonalState::new(w.map(|x| x / s)).expect("normalized")
}

fn brute_force_max(n: usize, p: f64, runs: u64, seed: u64) -> (f64, f64) {
    let v: Vec<f64> = (0..runs)
        .map(|i| {
            let mut r = rng::stream(seed, i);
            let (mut pending, mut t) = (n, 0u64);
            while pending > 0 {
                t += 1;
                pending -= (0..pending).filter(|_| r.gen::<f64>() < p).count();
            }
            t as f64
        })
        .collect();
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, (var / v.len() as f64).sqrt())
}

fn run_qrep(dir: &std::path::Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qrep"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .map_err(err)?;
    if !out.status.success() {
        return Err(format!("qrep {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let path = String::from_utf8(out.stdout).map_err(err)?;
    std::fs::read(path.trim()).map_err(err)
}

fn oracles(c: &mut Checks) -> Result<(), String> {
    // trajectories against the master equation
    let setup = cascade_setup(&ScenarioConfig::default());
    let (m, _) = calibrated_model(&setup, 5.9 * NS).map_err(err)?;
    let (t0, t1) = m.window();
    let grid: Vec<f64> = (0..=4000).map(|i| t0 + (t1 - t0) * i as f64 / 4000.0).collect();
    let f = flux_curves(&m, None, &grid).map_err(err)?;
    let s = batch_trajectories(m.lindblad(), &m.initial_state(), m.window(), 10_000, 31, &TrajectoryOptions::default())
        .map_err(err)?;
    let h = s.channel("h_oc").expect("herald channel");
    c.add(
        (h.mean - f.heralding_total()).abs() < 3.0 * h.stderr,
        format!("herald photons: trajectories {:.4} ± {:.4}, master {:.4}", h.mean, h.stderr, f.heralding_total()),
    );
    let (tp, tm) = (s.channel("t+_oc").expect("t+"), s.channel("t-_oc").expect("t-"));
    let (tm_mean, tse) = (tp.mean + tm.mean, tp.stderr.hypot(tm.stderr));
    c.add(
        (tm_mean - f.entangling_total()).abs() < 3.0 * tse,
        format!("telecom photons: trajectories {tm_mean:.4} ± {tse:.4}, master {:.4}", f.entangling_total()),
    );

    // z_n against cycle-by-cycle sampling
    let mut zn_ok = true;
    let mut zn_worst = 0.0f64;
    for n in [1u32, 2, 4] {
        for p in [0.05, 0.3] {
            let (mean, se) = brute_force_max(n as usize, p, 200_000, 40 + n as u64);
            let z = z_n(n, p).map_err(err)?;
            zn_ok &= (mean - z).abs() < 3.0 * se;
            zn_worst = zn_worst.max((mean - z).abs() / se);
        }
    }
    c.add(zn_ok, format!("z_n vs brute force: worst deviation {zn_worst:.2}σ (< 3σ)"));

    // Bell-diagonal maps against dense 4-qubit matrices
    let mut r = rng::stream(32, 0);
    let (mut swap_err, mut dejmps_err) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (a, b) = (random_bell(&mut r), random_bell(&mut r));
        let got = swap(&a, &b, SwapModel::ideal()).weights();
        let want = bell_oracle::swap_oracle(a.weights(), b.weights());
        swap_err = (0..4).fold(swap_err, |m, i| m.max((got[i] - want[i]).abs()));
        let (p, out) = dejmps_purify(&a, &b, 1.0).map_err(err)?;
        let (po, wo) = bell_oracle::dejmps_oracle(a.weights(), b.weights());
        let w = out.weights();
        dejmps_err = (0..4).fold(dejmps_err.max((p - po).abs()), |m, i| m.max((w[i] - wo[i]).abs()));
    }
    c.add(swap_err < 1e-10, format!("swap vs density-matrix oracle: max |Δ| = {swap_err:.1e}"));
    c.add(dejmps_err < 1e-10, format!("DEJMPS vs density-matrix oracle: max |Δ| = {dejmps_err:.1e}"));

    // seeded runs are byte-identical
    let dir = tempfile::tempdir().map_err(err)?;
    for args in [
        &["cascade", "pht", "--n-traj", "2000", "--seed", "5"][..],
        &["repeater", "rate", "--links", "2,4", "--strategy", "restart,keep", "--runs", "20000", "--seed", "5"][..],
        &["contrast", "--n-traj", "2000", "--seed", "5"][..],
    ] {
        let (a, b) = (run_qrep(dir.path(), args)?, run_qrep(dir.path(), args)?);
        c.add(a == b, format!("qrep {} twice: byte-identical ({} bytes)", args.join(" "), a.len()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("cavity design", cavity_design),
        ("cascade success probability", cascade_success),
        ("herald output lags telecom output", flux_lag),
        ("interference contrast", contrast),
        ("multi-photon bound", multiphoton),
        ("herald polarisation fidelity", herald),
        ("repeater rates", repeater_rates),
        ("storage times", storage),
        ("key rate", key_rate),
        ("purification", purification),
        ("oracle equivalences", oracles),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut checks)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let ok = outcome.is_ok() && checks.0.iter().all(|c| c.0);
        failed += usize::from(!ok);
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {:>2} {}: {name} ({secs:.1} s)", i + 1, if ok { "PASS" } else { "FAIL" });
        for (pass, what) in &checks.0 {
            println!("    [{}] {what}", if *pass { "ok" } else { "!!" });
        }
        if let Err(e) = outcome {
            println!("    [!!] error: {e}");
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
