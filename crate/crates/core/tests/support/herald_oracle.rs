//! Explicit post-selected herald state, built branch by branch.

#![allow(dead_code)]

/// Builds both decay branches explicitly in the basis
/// {π,V}_h ⊗ {H,V}_t ⊗ {−1_f, +1_f, m0, m−2, m+2}, projects onto π and
/// returns the overlap with (|H⟩(|−1⟩−|+1⟩) + |V⟩(|−1⟩+|+1⟩))/2.
pub fn overlap_fidelity(a: f64, ap: f64, b: f64, bp: f64, c: f64, cp: f64) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // index = herald*10 + telecom*5 + spin
    let mut h = [0.0f64; 20];
    h[0] = b;
    h[1] = -bp;
    h[10 + 3] = r * c;
    h[10 + 4] = r * cp;
    h[10 + 2] = r * (a + ap);
    let mut v = [0.0f64; 20];
    v[5] = b;
    v[6] = bp;
    v[10 + 5 + 3] = r * c;
    v[10 + 5 + 4] = -r * cp;
    v[10 + 5 + 2] = r * (a - ap);
    let nh = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sum: Vec<f64> = (0..20).map(|i| h[i] / nh + v[i] / nv).collect();
    let proj = &sum[..10];
    let n = proj.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sb = (bp / b).signum() * 0.5;
    let ideal = [0.5, -sb, 0.0, 0.0, 0.0, 0.5, sb, 0.0, 0.0, 0.0];
    let ov: f64 = proj.iter().zip(&ideal).map(|(x, y)| x * y).sum::<f64>() / n;
    ov * ov
}
