//! Seeded band-limited random functions for starting subspaces.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chebfun::{ChebFun, Interval, DEFAULT_TOL};
use crate::error::Result;
use crate::weight::{norm, Weight};

/// Half-width of the periodic window, relative to the domain half-width.
pub const ENLARGEMENT: f64 = 1.2;

/// `count` functions, each a truncated Fourier series with `cutoff` harmonics and
/// standard-normal coefficients, periodic on the enlarged window, restricted to
/// `domain` and scaled to unit L2 norm.
pub fn random_bandlimited(count: usize, domain: Interval, cutoff: usize, seed: u64) -> Result<Vec<ChebFun>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a0: f64 = rng.sample(StandardNormal);
        let mut harmonics = Vec::with_capacity(cutoff);
        for _ in 0..cutoff {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            harmonics.push((a, b));
        }
        let series = |x: f64| {
            let t = domain.to_ref(x);
            let mut s = a0;
            for (k, (a, b)) in harmonics.iter().enumerate() {
                let w = PI * (k + 1) as f64 * t / ENLARGEMENT;
                s += a * w.cos() + b * w.sin();
            }
            C64::new(s, 0.0)
        };
        let f = ChebFun::fit(series, domain, DEFAULT_TOL)?;
        let nrm = norm(&f, &Weight::Unit)?;
        out.push(f.scale(C64::new(1.0 / nrm, 0.0)));
    }
    Ok(out)
}
