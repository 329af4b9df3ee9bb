use qrep_core::cascade::*;
use qrep_core::constants::mhz_2pi;
use qrep_core::dynamics::{batch_trajectories, evolve_master, MasterOptions, QuantumState, TrajectoryOptions};
use qrep_core::Error;

fn decoupled() -> CascadeSetup {
    let mut s = CascadeSetup::reference();
    s.cavities.entangling = ModeRates { coupling: 0.0, kappa_oc: 0.0, kappa_loss: 0.0 };
    s.cavities.heralding = ModeRates { coupling: 0.0, kappa_oc: 0.0, kappa_loss: 0.0 };
    s.scheme.gamma_upper = 0.0;
    s.scheme.gamma_upper_to_intermediate = 0.0;
    s.scheme.gamma_intermediate = 0.0;
    s.scheme.gamma_intermediate_to_final = 0.0;
    s.scheme.gamma_intermediate_to_ground = 0.0;
    s
}

#[test]
fn no_drive_stays_in_ground() {
    let m = CascadeSetup::reference().build(&ControlPulse::centered(5.9e-9, 0.0).unwrap()).unwrap();
    let (t0, t1) = m.window();
    let grid: Vec<f64> = (0..=20).map(|i| t0 + (t1 - t0) * i as f64 / 20.0).collect();
    let states = evolve_master(m.lindblad(), &m.initial_state(), &grid, &MasterOptions::default()).unwrap();
    for s in &states {
        assert!((s.factor_population(ATOM, 0).unwrap() - 1.0).abs() < 1e-12);
    }
    let f = flux_curves(&m, None, &grid).unwrap();
    assert!(f.entangling.iter().chain(&f.heralding).all(|v| v.abs() < 1e-12));
}

#[test]
fn decoupled_calibration_matches_rabi_area() {
    // Residual cos²(A/2) reaches 1 % at A = 2 arccos(0.1).
    let cal = calibrate_pulse(&decoupled(), 5.9e-9).unwrap();
    let exact = 2.0 * 0.1f64.acos();
    assert!((cal.pulse.area() / exact - 1.0).abs() < 0.01, "area {}", cal.pulse.area());
    assert!((cal.pulse.area() / std::f64::consts::PI - 1.0).abs() < 0.07);
}

#[test]
fn calibration_contract_at_reference_width() {
    let setup = CascadeSetup::reference();
    let cal = calibrate_pulse(&setup, 5.9e-9).unwrap();
    assert!((0.009..0.01).contains(&cal.residual), "residual {}", cal.residual);
    let mut halved = cal.pulse;
    halved.peak_rabi *= 0.5;
    assert!(setup.build(&halved).unwrap().ground_residual().unwrap() > 0.01);
    let mut under = cal.pulse;
    under.peak_rabi *= 0.99;
    assert!(setup.build(&under).unwrap().ground_residual().unwrap() >= 0.01);
    assert!(calibrate_pulse(&setup, 0.1e-9).is_err());
}

#[test]
fn cavity_photon_decays_exponentially() {
    let mut s = decoupled();
    s.cavities.entangling = ModeRates { coupling: 0.0, kappa_oc: mhz_2pi(95.0), kappa_loss: mhz_2pi(8.0) };
    let m = s.build(&ControlPulse::centered(5.9e-9, 0.0).unwrap()).unwrap();
    let psi = QuantumState::basis(m.space(), &[0, 1, 0, 0]).unwrap();
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1e-9).collect();
    let f = flux_curves(&m, Some(&psi), &grid).unwrap();
    let k = s.cavities.entangling.kappa();
    for (t, v) in grid.iter().zip(&f.entangling) {
        let exact = 2.0 * mhz_2pi(95.0) * (-2.0 * k * t).exp();
        assert!((v - exact).abs() < 1e-6 * 2.0 * mhz_2pi(95.0), "t {t}");
    }
}

#[test]
fn no_output_coupler_no_success() {
    let mut s = CascadeSetup::reference();
    s.cavities.heralding.kappa_oc = 0.0;
    let (m, _) = calibrated_model(&s, 5.9e-9).unwrap();
    let o = success_probability(&m, 1000, 5).unwrap();
    assert_eq!(o.p_ht, 0.0);
    assert!((o.total() - 1.0).abs() < 1e-12);
}

#[test]
fn too_few_trajectories_rejected() {
    let m = CascadeSetup::reference().build(&ControlPulse::centered(5.9e-9, 1e9).unwrap()).unwrap();
    assert!(matches!(success_probability(&m, 10, 1), Err(Error::TooFewSamples { .. })));
    assert!(multiphoton_fraction(&m, 2000, 1).is_err());
}

#[test]
fn polarisation_outputs_are_symmetric_and_match_master() {
    let (m, _) = calibrated_model(&CascadeSetup::reference(), 5.9e-9).unwrap();
    let summary =
        batch_trajectories(m.lindblad(), &m.initial_state(), m.window(), 10_000, 17, &TrajectoryOptions::default())
            .unwrap();
    let p = summary.channel("t+_oc").unwrap();
    let q = summary.channel("t-_oc").unwrap();
    assert!((p.mean - q.mean).abs() < 3.0 * (p.stderr.powi(2) + q.stderr.powi(2)).sqrt());

    let (t0, t1) = m.window();
    let grid: Vec<f64> = (0..=4000).map(|i| t0 + (t1 - t0) * i as f64 / 4000.0).collect();
    let f = flux_curves(&m, None, &grid).unwrap();
    let h = summary.channel("h_oc").unwrap();
    assert!((h.mean - f.heralding_total()).abs() < 3.0 * h.stderr, "{} vs {}", h.mean, f.heralding_total());
    let t = p.mean + q.mean;
    let se = (p.stderr.powi(2) + q.stderr.powi(2)).sqrt();
    assert!((t - f.entangling_total()).abs() < 3.0 * se);
}

#[test]
fn stderr_scales_with_trajectory_count() {
    let (m, _) = calibrated_model(&CascadeSetup::reference(), 5.9e-9).unwrap();
    let a = success_probability(&m, 2000, 8).unwrap();
    let b = success_probability(&m, 8000, 8).unwrap();
    let ratio = a.p_ht_stderr / b.p_ht_stderr;
    assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    assert!((a.total() - 1.0).abs() < 1e-12);
    // same seed, prefix of the same streams
    let sweep = sweep_fwhm(&CascadeSetup::reference(), &[5.9e-9], 2000, 8).unwrap();
    assert_eq!(sweep[0].outcome, a);
}

#[test]
fn recycling_disabled_gives_no_multiphoton() {
    let mut s = CascadeSetup::reference();
    s.options.telecom_photons = Some(2);
    let (m, _) = calibrated_model(&s, 5.9e-9).unwrap();
    let mp = multiphoton_fraction(&m, 2000, 3).unwrap();
    assert_eq!(mp.multi, 0);
    assert_eq!(mp.fraction, 0.0);
}
