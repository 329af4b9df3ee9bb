//! Subcommand bodies: config in, tables out.

use qrep_core::cascade::{
    calibrated_model, flux_curves, multiphoton_fraction, success_probability, sweep_fwhm,
    BuildOptions, CascadeSetup, CrossedCavityParams, LevelScheme, LossChannel, ModeRates, RecyclingScope,
};
use qrep_core::cavity::{
    coupling_g, derive_cavity, fiber_overlap, mode_geometry, CavityDesign, CavityGeometry, MirrorSet,
};
use qrep_core::constants::to_mhz_2pi;
use qrep_core::herald::{degenerate_mode_fidelity, postselected_state, TransitionAmplitudes};
use qrep_core::indist::{bootstrap_contrast, contrast_report, KdeEstimate, TimeGrid, GRID_STEP};
use qrep_core::keyrate::{
    chain_secret_fraction, chain_state, error_rates, fidelity_gain_threshold, key_rate_benefit_threshold,
    threshold_fidelity, GateErrorConvention, PurifyAt, SwapModel,
};
use qrep_core::repeater::{mc_rate, mc_storage, restart_rate, restart_storage, LinkParams, McOptions, Strategy};
use qrep_core::Error;

use crate::config::ScenarioConfig;
use crate::output::{Cell, Table};
use crate::CliError;

type Out = Result<Table, CliError>;

fn seed(cfg: &ScenarioConfig, what: &str) -> Result<u64, CliError> {
    cfg.seed().ok_or_else(|| CliError::config(format!("{what} is sampled: pass --seed or set run.seed")))
}

fn mhz(v: f64) -> Cell {
    Cell::Num(to_mhz_2pi(v))
}

fn cavity_design(cfg: &ScenarioConfig, s: &str) -> Result<CavityDesign, Error> {
    let k = |name: &str| cfg.si(&format!("{s}.{name}"));
    let ppm = |name: &str| cfg.display(&format!("{s}.{name}"));
    Ok(CavityDesign {
        geometry: CavityGeometry::new(k("length"), k("roc1"), k("roc2"), k("wavelength"))?,
        mirrors: MirrorSet::new(ppm("t_oc"), ppm("t_hr"), ppm("parasitic"))?,
        partial_linewidth: k("partial_linewidth"),
        atomic_linewidth: k("atomic_linewidth"),
        atom_position: k("atom_position"),
    })
}

pub fn cavity(cfg: &ScenarioConfig) -> Out {
    let mut t = Table::new("cavity_design", &["cavity", "quantity", "value", "unit"]);
    for (label, section) in [("heralding", "cavity_h"), ("entangling", "cavity_t")] {
        let design = cavity_design(cfg, section)?;
        let d = derive_cavity(&design)?;
        let um = |v: f64| Cell::Num(v * 1e6);
        let mut row = |q: &str, v: Cell, unit: &str| t.push(vec![label.into(), q.into(), v, unit.into()]);
        row("waist", um(d.mode.waist), "um");
        row("waist_position", um(d.mode.waist_position), "um");
        row("rayleigh_range", um(d.mode.rayleigh_range), "um");
        row("radius_at_atom", um(d.radius_at_atom), "um");
        row("kappa_oc", mhz(d.kappa_oc), "MHz2pi");
        row("kappa_loss", mhz(d.kappa_loss), "MHz2pi");
        row("g", mhz(d.g_coupling), "MHz2pi");
        row("cooperativity", d.cooperativity.into(), "");
        if section == "cavity_h" {
            let z = cfg.si("cavity_h.probe_position");
            let g = coupling_g(&design.geometry, design.partial_linewidth, z)?;
            row("g_at_probe_position", mhz(g), "MHz2pi");
        } else {
            let m = mode_geometry(&design.geometry)?;
            let l = design.geometry.length;
            let eps = fiber_overlap(
                m.radius_at(l),
                m.wavefront_roc_at(l),
                cfg.si("fiber.mode_radius"),
                design.geometry.wavelength,
                cfg.display("fiber.index"),
            )?;
            row("fiber_overlap", eps.into(), "");
        }
    }
    Ok(t)
}

pub fn cascade_setup(cfg: &ScenarioConfig) -> CascadeSetup {
    let a = herald_amplitudes(cfg);
    CascadeSetup {
        scheme: LevelScheme {
            gamma_upper: cfg.si("scheme.gamma_upper"),
            gamma_upper_to_intermediate: cfg.si("scheme.gamma_upper_to_intermediate"),
            gamma_intermediate: cfg.si("scheme.gamma_intermediate"),
            gamma_intermediate_to_final: cfg.si("scheme.gamma_intermediate_to_final"),
            gamma_intermediate_to_ground: cfg.si("scheme.gamma_intermediate_to_ground"),
            telecom_sign: cfg.display("scheme.telecom_sign"),
            herald_sign: cfg.display("scheme.herald_sign"),
            herald_amplitudes: a,
        },
        cavities: CrossedCavityParams {
            entangling: ModeRates {
                coupling: cfg.si("cascade.g_t"),
                kappa_oc: cfg.si("cascade.kappa_t_oc"),
                kappa_loss: cfg.si("cascade.kappa_t_loss"),
            },
            heralding: ModeRates {
                coupling: cfg.si("cascade.g_h"),
                kappa_oc: cfg.si("cascade.kappa_h_oc"),
                kappa_loss: cfg.si("cascade.kappa_h_loss"),
            },
            second_herald: None,
            fiber_efficiency: cfg.display("cascade.fiber_efficiency"),
        },
        options: BuildOptions {
            worst_case_recycling: cfg.flag("cascade.worst_case_recycling"),
            recycling_scope: match cfg.words("cascade.recycling_scope")[0].as_str() {
                "all_escapes" => RecyclingScope::AllEscapes,
                _ => RecyclingScope::LeavingManifold,
            },
            light_shift: cfg.si("cascade.light_shift"),
            ..BuildOptions::default()
        },
    }
}

fn herald_amplitudes(cfg: &ScenarioConfig) -> (f64, f64, f64) {
    (cfg.display("herald.a"), cfg.display("herald.b"), cfg.display("herald.c"))
}

fn note_pulse(t: &mut Table, peak_rabi: f64, residual: f64) {
    t.note("peak_rabi_MHz2pi", to_mhz_2pi(peak_rabi));
    t.note("ground_residual", residual);
}

pub fn cascade_flux(cfg: &ScenarioConfig) -> Out {
    let (m, cal) = calibrated_model(&cascade_setup(cfg), cfg.si("pulse.fwhm"))?;
    let (t0, t1) = m.window();
    let n = cfg.count("cascade.flux_points") as usize;
    let grid: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
    let f = flux_curves(&m, None, &grid)?;
    let mut t = Table::new("cascade_flux", &["t_ns", "telecom_flux_per_us", "herald_flux_per_us"]);
    note_pulse(&mut t, cal.pulse.peak_rabi, cal.residual);
    t.note("telecom_total", f.entangling_total());
    t.note("herald_total", f.heralding_total());
    t.note("herald_fraction_after_45ns", f.heralding_fraction_after(45e-9));
    for i in 0..grid.len() {
        t.push(vec![(grid[i] * 1e9).into(), (f.entangling[i] * 1e-6).into(), (f.heralding[i] * 1e-6).into()]);
    }
    Ok(t)
}

pub fn cascade_pht(cfg: &ScenarioConfig) -> Out {
    let seed = seed(cfg, "cascade pht")?;
    let (m, cal) = calibrated_model(&cascade_setup(cfg), cfg.si("pulse.fwhm"))?;
    let n = cfg.count("cascade.n_traj") as usize;
    let o = success_probability(&m, n, seed)?;
    let mut t = Table::new("cascade_pht", &["quantity", "value", "stderr"]);
    note_pulse(&mut t, cal.pulse.peak_rabi, cal.residual);
    t.note("trajectories", o.trajectories);
    t.push(vec!["p_ht".into(), o.p_ht.into(), o.p_ht_stderr.into()]);
    for (ch, v, se) in &o.losses {
        t.push(vec![format!("loss_{}", ch.label()).as_str().into(), (*v).into(), (*se).into()]);
    }
    t.push(vec!["total".into(), o.total().into(), Cell::Empty]);
    Ok(t)
}

pub fn cascade_sweep(cfg: &ScenarioConfig) -> Out {
    let seed = seed(cfg, "cascade sweep")?;
    let fwhms = cfg.si_list("cascade.sweep_fwhm");
    let pts = sweep_fwhm(&cascade_setup(cfg), &fwhms, cfg.count("cascade.n_traj") as usize, seed)?;
    let mut cols = vec!["fwhm_ns", "peak_rabi_MHz2pi", "ground_residual", "p_ht", "p_ht_stderr"];
    let loss_cols = ["loss_free_space", "loss_entangling_parasitic", "loss_heralding_parasitic", "loss_fiber_coupling", "loss_other"];
    cols.extend(loss_cols);
    let mut t = Table::new("cascade_sweep", &cols);
    for p in &pts {
        let mut row: Vec<Cell> = vec![
            (p.fwhm * 1e9).into(),
            mhz(p.calibration.pulse.peak_rabi),
            p.calibration.residual.into(),
            p.outcome.p_ht.into(),
            p.outcome.p_ht_stderr.into(),
        ];
        row.extend(LossChannel::ALL.iter().map(|c| Cell::Num(p.outcome.loss(*c))));
        t.push(row);
    }
    Ok(t)
}

pub fn cascade_multiphoton(cfg: &ScenarioConfig) -> Out {
    let seed = seed(cfg, "cascade multiphoton")?;
    let mut setup = cascade_setup(cfg);
    setup.options.worst_case_recycling = true;
    let (m, cal) = calibrated_model(&setup, cfg.si("pulse.fwhm"))?;
    let e = multiphoton_fraction(&m, cfg.count("cascade.n_traj") as usize, seed)?;
    let mut t = Table::new("cascade_multiphoton", &["heralded", "multi", "fraction", "ci_lo", "ci_hi"]);
    note_pulse(&mut t, cal.pulse.peak_rabi, cal.residual);
    t.note("worst_case_recycling", true);
    t.push(vec![e.heralded.into(), e.multi.into(), e.fraction.into(), e.ci95.0.into(), e.ci95.1.into()]);
    Ok(t)
}

pub fn contrast(cfg: &ScenarioConfig) -> Out {
    let seed = seed(cfg, "contrast")?;
    let setup = cascade_setup(cfg);
    let n = cfg.count("contrast.n_traj") as usize;
    let resamples = cfg.count("contrast.bootstrap") as usize;
    let windows = cfg.si_list("contrast.windows");
    let (kt, kh) = (setup.cavities.entangling.kappa(), setup.cavities.heralding.kappa());
    let mut t = Table::new("contrast", &["fwhm_ns", "window_ns", "contrast", "stderr", "retained", "fidelity", "pairs"]);
    for fwhm in cfg.si_list("contrast.fwhm") {
        let (m, _) = calibrated_model(&setup, fwhm)?;
        let pairs = success_probability(&m, n, seed)?.arrivals.successful_pairs();
        let grid = TimeGrid::new(0.0, m.window().1, GRID_STEP)?;
        let kde = KdeEstimate::fit(&pairs, kt, kh, Some(grid))?;
        let rep = contrast_report(&kde, &[], &windows)?;
        let se = if resamples > 0 { Some(bootstrap_contrast(&pairs, kt, kh, grid, resamples, seed)?) } else { None };
        let f = fwhm * 1e9;
        t.push(vec![f.into(), Cell::Empty, rep.contrast.into(), se.into(), 1.0.into(), rep.fidelity.into(), pairs.len().into()]);
        for p in &rep.postselection {
            t.push(vec![f.into(), (p.window * 1e9).into(), p.contrast.into(), Cell::Empty, p.retained.into(), Cell::Empty, pairs.len().into()]);
        }
    }
    Ok(t)
}

pub fn herald(cfg: &ScenarioConfig) -> Out {
    let (a, b, c) = herald_amplitudes(cfg);
    let s = postselected_state(&TransitionAmplitudes::symmetric(a, b, c)?)?;
    let closed = degenerate_mode_fidelity(a, b, c)?;
    let mut t = Table::new("herald_fidelity", &["quantity", "value"]);
    t.push(vec!["h_weight".into(), s.h_weight.into()]);
    t.push(vec!["v_weight".into(), s.v_weight.into()]);
    t.push(vec!["fidelity".into(), s.fidelity().into()]);
    t.push(vec!["infidelity".into(), (1.0 - s.fidelity()).into()]);
    t.push(vec!["fidelity_closed_form".into(), closed.into()]);
    Ok(t)
}

pub fn link_params(cfg: &ScenarioConfig) -> LinkParams {
    LinkParams {
        link_length: 0.0,
        attenuation_length: cfg.display("repeater.attenuation_length"),
        fiber_speed: cfg.display("repeater.fiber_speed"),
        latency: cfg.si("repeater.latency"),
        p_ht: cfg.display("repeater.p_ht"),
        eta_h: cfg.display("repeater.eta_h"),
        eta_t: cfg.display("repeater.eta_t"),
        swap_ratio: cfg.display("repeater.swap_ratio"),
        p_p: cfg.display("repeater.p_p"),
    }
}

/// Distances in km from min to max (inclusive, within rounding) in steps.
fn distances(cfg: &ScenarioConfig) -> Vec<f64> {
    let (lo, hi, step) = (
        cfg.display("repeater.distance_min"),
        cfg.display("repeater.distance_max"),
        cfg.display("repeater.distance_step"),
    );
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// (links, strategy, sampled?) series requested by the config.
fn series(cfg: &ScenarioConfig) -> Result<Vec<(u32, Strategy, bool)>, CliError> {
    let mc_restart = cfg.flag("repeater.mc");
    let mut out = Vec::new();
    for n in cfg.counts("repeater.links") {
        let n = u32::try_from(n).map_err(|_| CliError::config("repeater.links is too large"))?;
        for s in cfg.words("repeater.strategies") {
            match s.as_str() {
                "keep" if n == 1 => {}
                "keep" => out.push((n, Strategy::Keep, true)),
                _ => out.push((n, Strategy::Restart, mc_restart)),
            }
        }
    }
    let sampled = out.iter().any(|s| s.2);
    if sampled {
        seed(cfg, "the keep strategy (or repeater.mc)")?;
    }
    Ok(out)
}

fn mc_options(cfg: &ScenarioConfig) -> McOptions {
    let mut o = McOptions::new(cfg.count("repeater.runs") as usize, cfg.seed().unwrap_or(0));
    o.bootstrap_resamples = cfg.count("repeater.bootstrap") as usize;
    o
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Restart => "restart",
        Strategy::Keep => "keep",
    }
}

pub fn repeater_rate(cfg: &ScenarioConfig) -> Out {
    let base = link_params(cfg);
    base.validate()?;
    let opts = mc_options(cfg);
    let mut t = Table::new("repeater_rate", &["links", "strategy", "method", "L_km", "rate_per_s", "ci_lo", "ci_hi"]);
    for (n, s, sampled) in series(cfg)? {
        for l in distances(cfg) {
            let (r, method) = if sampled { (mc_rate(n, l, &base, s, &opts)?, "mc") } else { (restart_rate(n, l, &base)?, "analytic") };
            let ci = r.rate_ci(&base.with_link_length(l / n as f64));
            t.push(vec![
                n.into(),
                strategy_name(s).into(),
                method.into(),
                l.into(),
                r.rate.into(),
                ci.map(|c| c.0).into(),
                ci.map(|c| c.1).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn repeater_storage(cfg: &ScenarioConfig) -> Out {
    let base = link_params(cfg);
    base.validate()?;
    let opts = mc_options(cfg);
    let mut t = Table::new("repeater_storage", &["links", "strategy", "method", "L_km", "storage_ms", "ci_lo", "ci_hi"]);
    for (n, s, sampled) in series(cfg)? {
        for l in distances(cfg) {
            let (r, method) = if sampled { (mc_storage(n, l, &base, s, &opts)?, "mc") } else { (restart_storage(n, l, &base)?, "analytic") };
            t.push(vec![
                n.into(),
                strategy_name(s).into(),
                method.into(),
                l.into(),
                (r.time * 1e3).into(),
                r.time_ci.map(|c| c.0 * 1e3).into(),
                r.time_ci.map(|c| c.1 * 1e3).into(),
            ]);
        }
    }
    Ok(t)
}

fn keyrate_links(cfg: &ScenarioConfig) -> Vec<u32> {
    cfg.counts("keyrate.links").into_iter().map(|n| n as u32).collect()
}

pub fn keyrate_table(cfg: &ScenarioConfig) -> Out {
    let c = cfg.display("keyrate.contrast");
    let (lo, step) = (cfg.display("keyrate.fidelity_min"), cfg.display("keyrate.fidelity_step"));
    let steps = ((1.0 - lo) / step + 1e-9).floor() as usize;
    let mut t = Table::new(
        "keyrate_table",
        &["links", "contrast", "bsm_fidelity", "fidelity", "eps_x", "eps_y", "eps_z", "secret_fraction"],
    );
    for n in keyrate_links(cfg) {
        for i in 0..=steps {
            let f = ((lo + step * i as f64) * 1e12).round() / 1e12;
            let s = chain_state(n, c, SwapModel::from_bsm_fidelity(f)?)?;
            let e = error_rates(&s)?;
            let r = chain_secret_fraction(n, c, f)?;
            t.push(vec![
                n.into(),
                c.into(),
                f.into(),
                s.fidelity().into(),
                e.eps_x.into(),
                e.eps_y.into(),
                e.eps_z.into(),
                r.raw.into(),
            ]);
        }
    }
    Ok(t)
}

fn unreachable_as_empty(r: qrep_core::Result<f64>) -> Result<Option<f64>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unreachable(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn keyrate_threshold(cfg: &ScenarioConfig) -> Out {
    let c = cfg.display("keyrate.contrast");
    let mut t = Table::new("keyrate_threshold", &["links", "contrast", "target", "bsm_fidelity"]);
    for n in keyrate_links(cfg) {
        for target in cfg.display_list("keyrate.targets") {
            let f = unreachable_as_empty(threshold_fidelity(c, n, target))?;
            t.push(vec![n.into(), c.into(), target.into(), f.into()]);
        }
    }
    Ok(t)
}

pub fn keyrate_purification(cfg: &ScenarioConfig) -> Out {
    let c = cfg.display("keyrate.contrast");
    let mut t = Table::new("keyrate_purification", &["quantity", "links", "variant", "value"]);
    t.note("contrast", c);
    for n in keyrate_links(cfg) {
        for conv in GateErrorConvention::ALL {
            let e = unreachable_as_empty(fidelity_gain_threshold(c, n, conv))?;
            t.push(vec!["fidelity_gain_gate_error".into(), n.into(), format!("e={}", conv.label()).as_str().into(), e.into()]);
        }
        for (at, name) in [(PurifyAt::EndToEnd, "end_to_end"), (PurifyAt::ElementaryLinks, "elementary_links")] {
            let cs = unreachable_as_empty(key_rate_benefit_threshold(n, at))?;
            t.push(vec!["key_rate_benefit_contrast".into(), n.into(), name.into(), cs.into()]);
        }
    }
    Ok(t)
}
