//! Dense 4-qubit density-matrix oracles for Bell-diagonal maps.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type M = DMatrix<C64>;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn id(n: usize) -> M {
    M::identity(n, n)
}

pub fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

pub fn pauli_x() -> M {
    M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_z() -> M {
    M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// Bell vectors in the order (Ψ⁺, Ψ⁻, Φ⁺, Φ⁻), basis |q0 q1⟩.
pub fn bell_vectors() -> Vec<M> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: [f64; 4]| M::from_column_slice(4, 1, &a.map(|x| c(x * r)));
    vec![
        v([0.0, 1.0, 1.0, 0.0]),
        v([0.0, 1.0, -1.0, 0.0]),
        v([1.0, 0.0, 0.0, 1.0]),
        v([1.0, 0.0, 0.0, -1.0]),
    ]
}

pub fn bell_density(w: [f64; 4]) -> M {
    bell_vectors().iter().zip(w).fold(M::zeros(4, 4), |acc, (v, x)| acc + v * v.adjoint() * c(x))
}

pub fn bell_weights(rho: &M) -> [f64; 4] {
    let tr = rho.trace().re;
    let b = bell_vectors();
    [0, 1, 2, 3].map(|i| (b[i].adjoint() * rho * &b[i])[(0, 0)].re / tr)
}

/// Ideal swap on pairs (q0,q1) and (q2,q3): Bell measurement on q1,q2, then a
/// Pauli on q3 chosen so that Ψ⁺ inputs always yield Ψ⁺.
pub fn swap_oracle(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let rho = kron(&bell_density(a), &bell_density(b));
    let psi = bell_density([1.0, 0.0, 0.0, 0.0]);
    let reference = kron(&psi, &psi);
    let paulis = [id(2), pauli_x(), pauli_z(), pauli_x() * pauli_z()];
    let mut out = M::zeros(4, 4);
    for beta in bell_vectors() {
        // ⟨β|_{12}: 4×16 map onto (q0, q3)
        let mut proj = M::zeros(4, 16);
        for q0 in 0..2 {
            for q3 in 0..2 {
                for m in 0..4 {
                    proj[(q0 * 2 + q3, q0 * 8 + m * 2 + q3)] = beta[(m, 0)].conj();
                }
            }
        }
        let cond = |r: &M| &proj * r * proj.adjoint();
        let ref_out = cond(&reference);
        let fix = paulis
            .iter()
            .map(|p| kron(&id(2), p))
            .find(|u| bell_weights(&(u * &ref_out * u.adjoint()))[0] > 1.0 - 1e-12)
            .expect("some Pauli restores Ψ⁺");
        let s = cond(&rho);
        out += &fix * s * fix.adjoint();
    }
    bell_weights(&out)
}

pub fn rx(theta: f64) -> M {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    M::from_row_slice(2, 2, &[c(co), C64::new(0.0, -si), C64::new(0.0, -si), c(co)])
}

pub fn single(op: &M, q: usize) -> M {
    let one = id(2);
    (0..4).fold(M::identity(1, 1), |acc, k| kron(&acc, if k == q { op } else { &one }))
}

pub fn cnot(control: usize, target: usize) -> M {
    let mut m = M::zeros(16, 16);
    for i in 0..16 {
        let bit = |q: usize| (i >> (3 - q)) & 1;
        let j = if bit(control) == 1 { i ^ (1 << (3 - target)) } else { i };
        m[(j, i)] = c(1.0);
    }
    m
}

/// Recurrence protocol on pairs (q0,q1) and (q2,q3) with Alice = q0,q2 and Bob = q1,q3.
/// Inputs and output are in Ψ⁺-target labelling, mapped by an X on Alice's qubits.
pub fn dejmps_oracle(a: [f64; 4], b: [f64; 4]) -> (f64, [f64; 4]) {
    let mut rho = kron(&bell_density(a), &bell_density(b));
    let x = pauli_x();
    let steps = [
        single(&x, 0),
        single(&x, 2),
        single(&rx(std::f64::consts::FRAC_PI_2), 0),
        single(&rx(std::f64::consts::FRAC_PI_2), 2),
        single(&rx(-std::f64::consts::FRAC_PI_2), 1),
        single(&rx(-std::f64::consts::FRAC_PI_2), 3),
        cnot(0, 2),
        cnot(1, 3),
    ];
    for u in &steps {
        rho = u * rho * u.adjoint();
    }
    // keep q2 == q3, trace them out
    let mut kept = M::zeros(4, 4);
    for m in [0usize, 3] {
        for i in 0..4 {
            for j in 0..4 {
                kept[(i, j)] += rho[(i * 4 + m, j * 4 + m)];
            }
        }
    }
    let p = kept.trace().re;
    let xa = kron(&x, &id(2));
    let kept = &xa * kept * xa.adjoint();
    (p, bell_weights(&kept))
}
