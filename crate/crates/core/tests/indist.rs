use qrep_core::cascade::{calibrated_model, success_probability, CascadeSetup};
use qrep_core::indist::*;
use qrep_core::rng;
use rand_distr::{Distribution, Normal};

/// Analytic bivariate normal density on a grid; rows herald, columns telecom.
fn bivariate(grid: TimeGrid, mu: (f64, f64), sigma: (f64, f64), rho: f64) -> KdeEstimate {
    let d = grid
        .times()
        .flat_map(|th| {
            grid.times().map(move |tt| {
                let x = (th - mu.0) / sigma.0;
                let y = (tt - mu.1) / sigma.1;
                (-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * (1.0 - rho * rho))).exp()
            })
        })
        .collect();
    KdeEstimate::from_density(grid, d).unwrap()
}

fn erf(x: f64) -> f64 {
    // series is plenty for the moderate arguments used here
    let mut sum = 0.0;
    let mut term = x;
    for n in 0..200 {
        sum += term / (2 * n + 1) as f64;
        term *= -x * x / (n + 1) as f64;
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn correlated_gaussian_contrast_and_retention() {
    let grid = TimeGrid::new(0.0, 60.0, 0.25).unwrap();
    let (sh, st, rho) = (5.0, 2.0, 0.6);
    let kde = bivariate(grid, (30.0, 25.0), (sh, st), rho);
    assert!((kde.total() - 1.0).abs() < 1e-3);
    let c = average_contrast(&kde);
    assert!((c - (1.0 - rho * rho).sqrt()).abs() < 1e-3, "C = {c}");

    let windows = [0.1, 1.0, 3.0, 8.0, 1e9];
    let ps = postselect_tradeoff(&kde, &windows).unwrap();
    assert_eq!(ps[0].contrast, 1.0);
    for p in &ps[1..4] {
        assert!((p.retained - erf(p.window / (2.0 * sh))).abs() < 1e-2, "{p:?}");
    }
    assert!(ps.windows(2).all(|w| w[1].contrast <= w[0].contrast + 1e-12));
    assert!((ps[4].contrast - c).abs() < 1e-12);
    assert!((ps[4].retained - 1.0).abs() < 1e-9);
}

#[test]
fn conditional_mean_follows_regression_slope() {
    let (mh, mt, sh, st, rho) = (40e-9, 30e-9, 5e-9, 2e-9, 0.6);
    let mut r = rng::stream(99, 0);
    let z = Normal::new(0.0, 1.0).unwrap();
    let samples: Vec<(f64, f64)> = (0..100_000)
        .map(|_| {
            let (u, v): (f64, f64) = (z.sample(&mut r), z.sample(&mut r));
            (mh + sh * u, mt + st * (rho * u + (1.0 - rho * rho).sqrt() * v))
        })
        .collect();
    let kde = KdeEstimate::fit_any(&samples, (0.5e-9, 0.25e-9), None).unwrap();
    assert!((kde.total() - 1.0).abs() < 1e-3);
    let means: Vec<f64> = [-1.0, 0.0, 1.0].iter().map(|k| kde.conditional_envelope(mh + k * sh).unwrap().mean()).collect();
    let slope = (means[2] - means[0]) / (2.0 * sh);
    let expected = rho * st / sh;
    assert!((slope / expected - 1.0).abs() < 0.05, "slope {slope}");
    assert!((means[1] - mt).abs() < 0.05e-9);
}

#[test]
fn cascade_samples_marginal_envelopes_and_contrast() {
    let setup = CascadeSetup::reference();
    let (m, _) = calibrated_model(&setup, 5.9e-9).unwrap();
    let samples = success_probability(&m, 18_000, 21).unwrap().arrivals.successful_pairs();
    assert!(samples.len() >= 10_000, "{}", samples.len());
    let (kt, kh) = (setup.cavities.entangling.kappa(), setup.cavities.heralding.kappa());
    let grid = TimeGrid::new(0.0, m.window().1, GRID_STEP).unwrap();
    let kde = KdeEstimate::fit(&samples, kt, kh, Some(grid)).unwrap();
    assert!((kde.total() - 1.0).abs() < 1e-3);
    assert!(kde.density().iter().all(|v| *v >= 0.0));

    // herald marginal against a 1 ns histogram
    let marginal = kde.herald_marginal();
    let bins = (grid.end() / 1e-9).ceil() as usize;
    let mut hist = vec![0.0; bins];
    for (th, _) in &samples {
        hist[((th / 1e-9) as usize).min(bins - 1)] += 1.0 / samples.len() as f64;
    }
    let mut kde_bins = vec![0.0; bins];
    for (i, p) in marginal.iter().enumerate() {
        let t = grid.time(i);
        let w = if i == 0 || i == grid.len - 1 { 0.5 } else { 1.0 };
        kde_bins[((t / 1e-9) as usize).min(bins - 1)] += w * p * grid.step;
    }
    let tv = 0.5 * hist.iter().zip(&kde_bins).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!(tv < 0.05, "TV = {tv}");

    let c = average_contrast(&kde);
    assert!(c >= 0.95 && c <= 1.0, "C = {c}");
    let ps = postselect_tradeoff(&kde, &[0.1e-9]).unwrap();
    assert_eq!(ps[0].contrast, 1.0);
}

#[test]
fn early_middle_late_envelopes_differ_weakly() {
    let setup = CascadeSetup::reference();
    let (m, _) = calibrated_model(&setup, 5.9e-9).unwrap();
    let samples = success_probability(&m, 60_000, 23).unwrap().arrivals.successful_pairs();
    let (kt, kh) = (setup.cavities.entangling.kappa(), setup.cavities.heralding.kappa());
    let grid = TimeGrid::new(0.0, m.window().1, GRID_STEP).unwrap();
    let kde = KdeEstimate::fit(&samples, kt, kh, Some(grid)).unwrap();
    let times = [15e-9, 22e-9, 35e-9];
    let envs: Vec<Envelope> = times.iter().map(|t| kde.conditional_envelope(*t).unwrap()).collect();
    let mut worst = 1.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            let c = pair_contrast(&envs[i], &envs[j]).unwrap();
            println!("herald {:.0} ns vs {:.0} ns: pair contrast {c:.4}", times[i] * 1e9, times[j] * 1e9);
            worst = worst.min(c);
        }
    }
    assert!(worst >= 0.9, "smallest pairwise contrast {worst:.4} < 0.9");
}
