use num_complex::Complex64 as C64;

use super::model::LindbladModel;
use super::ode::{Dopri5, Tolerances};
use super::state::{hermiticity_error, positive_after_shift, QuantumState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct MasterOptions {
    pub tolerances: Tolerances,
    /// Largest tolerated |Tr ρ − 1| anywhere on the grid.
    pub max_trace_drift: f64,
    /// Run the (cubic) positivity check on every returned state.
    pub check_positivity: bool,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            // Tighter relative tolerance than for trajectories: entries of order
            // one otherwise leave room for eigenvalues below −1e-8.
            tolerances: Tolerances { atol: 1e-9, rtol: 1e-8 },
            max_trace_drift: 1e-6,
            check_positivity: true,
        }
    }
}

/// Integrates the Lindblad equation from `grid[0]` (where the state is `rho0`)
/// and returns the state at every grid point, the first being `rho0` itself.
pub fn evolve_master(
    model: &LindbladModel,
    rho0: &QuantumState,
    grid: &[f64],
    opts: &MasterOptions,
) -> Result<Vec<QuantumState>> {
    let space = model.space();
    if rho0.space() != space {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: rho0.space().dim(),
        });
    }
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid", "times must be finite and strictly increasing"));
    }
    let n = space.dim();
    let y0 = rho0.to_density();
    let mut scratch = Vec::with_capacity(n * n);
    let mut rhs = |t: f64, y: &[C64], out: &mut [C64]| model.master_rhs(t, y, out, &mut scratch);
    let mut stepper = Dopri5::new(grid[0], y0.clone(), opts.tolerances, model.max_step());

    let mut out = Vec::with_capacity(grid.len());
    out.push(rho0.clone());
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    let mut next = 1;
    let t_end = *grid.last().unwrap();
    while next < grid.len() {
        stepper.step(&mut rhs, t_end)?;
        let dense = stepper.dense();
        while next < grid.len() && grid[next] <= stepper.time() {
            let t = grid[next];
            if t == stepper.time() {
                buf.copy_from_slice(stepper.state());
            } else {
                dense.eval(t, &mut buf);
            }
            out.push(finish_state(model, &buf, t, opts)?);
            next += 1;
        }
    }
    Ok(out)
}

fn finish_state(model: &LindbladModel, rho: &[C64], t: f64, opts: &MasterOptions) -> Result<QuantumState> {
    let n = model.space().dim();
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { context: format!("in density matrix at t = {t:e} s") });
    }
    let trace: f64 = (0..n).map(|i| rho[i * n + i].re).sum();
    if (trace - 1.0).abs() > opts.max_trace_drift {
        return Err(Error::TraceDrift { time: t, deviation: trace - 1.0 });
    }
    // The update is Hermitian by construction; symmetrise away rounding.
    let mut sym = rho.to_vec();
    for i in 0..n {
        sym[i * n + i].im = 0.0;
        for j in i + 1..n {
            let avg = (rho[i * n + j] + rho[j * n + i].conj()) * 0.5;
            sym[i * n + j] = avg;
            sym[j * n + i] = avg.conj();
        }
    }
    debug_assert!(hermiticity_error(rho, n) < 1e-6);
    if opts.check_positivity && !positive_after_shift(&sym, n, 1e-8) {
        return Err(Error::NonFinite { context: format!("(negative eigenvalue) at t = {t:e} s") });
    }
    Ok(QuantumState::density_unchecked(model.space(), sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CollapseChannel, Coefficient, HamiltonianTerm, HilbertSpace, Operator};

    fn atom() -> HilbertSpace {
        HilbertSpace::single("atom", 2).unwrap()
    }

    fn grid(t1: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t1 * i as f64 / n as f64).collect()
    }

    #[test]
    fn free_decay_is_exponential() {
        let s = atom();
        let gamma: f64 = 2.0e7;
        let lower = Operator::local_transition(&s, "atom", 0, 1).unwrap();
        let m = LindbladModel::new(
            s.clone(),
            vec![],
            vec![CollapseChannel { label: "decay".into(), operator: lower.scale_re(gamma.sqrt()) }],
        )
        .unwrap();
        let rho0 = QuantumState::basis(&s, &[1]).unwrap();
        let g = grid(3e-7, 60);
        let states = evolve_master(&m, &rho0, &g, &MasterOptions::default()).unwrap();
        for (t, st) in g.iter().zip(&states) {
            let pe = st.populations()[1];
            assert!((pe - (-gamma * t).exp()).abs() < 1e-6, "t = {t}: {pe}");
        }
    }

    #[test]
    fn resonant_rabi_oscillation() {
        let s = atom();
        let omega = 2.0 * std::f64::consts::PI * 10e6;
        let sx = Operator::local_transition(&s, "atom", 1, 0)
            .unwrap()
            .add(&Operator::local_transition(&s, "atom", 0, 1).unwrap())
            .unwrap();
        let m = LindbladModel::new(
            s.clone(),
            vec![HamiltonianTerm { coefficient: Coefficient::Constant(omega / 2.0), operator: sx }],
            vec![],
        )
        .unwrap();
        let rho0 = QuantumState::basis(&s, &[0]).unwrap();
        let g = grid(4e-7, 200);
        let states = evolve_master(&m, &rho0, &g, &MasterOptions::default()).unwrap();
        for (t, st) in g.iter().zip(&states) {
            let exact = (omega * t / 2.0).sin().powi(2);
            assert!((st.populations()[1] - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn trivial_model_keeps_state() {
        let s = atom();
        let m = LindbladModel::new(s.clone(), vec![], vec![]).unwrap();
        let rho0 = QuantumState::pure_normalized(&s, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let states = evolve_master(&m, &rho0, &grid(1e-6, 5), &MasterOptions::default()).unwrap();
        for st in &states {
            let d = st.to_density();
            let d0 = rho0.to_density();
            assert!(d.iter().zip(&d0).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn rejects_bad_grid_and_space() {
        let s = atom();
        let m = LindbladModel::new(s.clone(), vec![], vec![]).unwrap();
        let rho0 = QuantumState::basis(&s, &[0]).unwrap();
        assert!(evolve_master(&m, &rho0, &[0.0, 0.0], &MasterOptions::default()).is_err());
        let other = HilbertSpace::single("x", 3).unwrap();
        let r = QuantumState::basis(&other, &[0]).unwrap();
        assert!(matches!(
            evolve_master(&m, &r, &[0.0, 1.0], &MasterOptions::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
