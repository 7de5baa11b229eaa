//! Seeded sampling of complex vectors.

use crate::gauge::ConvexBody;
use crate::{norm, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian vector.
pub fn gaussian<R: Rng>(rng: &mut R, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Uniform point on the unit sphere of `C^n`.
pub fn on_sphere<R: Rng>(rng: &mut R, n: usize) -> Vec<C> {
    loop {
        let g = gaussian(rng, n);
        let s = norm(&g);
        if s > 1e-12 {
            return g.into_iter().map(|c| c / s).collect();
        }
    }
}

/// `count` deterministic points on the unit sphere of `C^n`.
pub fn sphere_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<C>> {
    let mut r = rng(seed);
    (0..count).map(|_| on_sphere(&mut r, n)).collect()
}

/// Uniform point of the open unit disc with modulus at most `rmax`.
pub fn in_disc<R: Rng>(rng: &mut R, rmax: f64) -> C {
    let r = rmax * rng.random::<f64>().sqrt();
    C::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

/// Random points of the body with gauge at most `pmax`, radially
/// distributed like the uniform measure of a ball.
pub fn interior_points(body: &ConvexBody, count: usize, pmax: f64, seed: u64) -> Vec<Vec<C>> {
    let mut r = rng(seed);
    let n = body.dim();
    (0..count)
        .map(|_| {
            let u = on_sphere(&mut r, n);
            let t = pmax * r.random::<f64>().powf(1.0 / (2.0 * n as f64));
            let p = body.gauge_unchecked(&u);
            u.iter().map(|c| c * (t / p)).collect()
        })
        .collect()
}
