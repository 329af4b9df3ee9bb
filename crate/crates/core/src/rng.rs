//! Per-index random streams.
//!
//! Every Monte Carlo unit (trajectory, chain run, bootstrap resample) draws from
//! its own ChaCha stream selected by `(seed, index)`, so results do not depend
//! on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample the trial index (starting at 1) of the first success of a Bernoulli(p) process.
pub fn geometric<R: rand::Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    // 1 - u in (0, 1]
    let u: f64 = 1.0 - rng.gen::<f64>();
    let k = (u.ln() / (-p).ln_1p()).floor();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64 + 1
    }
}
