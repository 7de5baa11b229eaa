//! Bodies known only through a gauge evaluator.

use crate::{norm, pairing, C};
use nalgebra::{DMatrix, DVector};
use std::fmt;

/// A user-supplied gauge evaluator.
///
/// `gauge` must be a Minkowski gauge of a bounded convex body containing 0
/// in its interior. `support` may return a supporting functional at a
/// nonzero point; otherwise one is estimated by central differences.
pub trait GaugeOracle: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn gauge(&self, z: &[C]) -> f64;
    fn support(&self, _z: &[C]) -> Option<Vec<C>> {
        None
    }
}

/// Central-difference gradient, rescaled so that `Re(z . w) = p(z)`.
pub(crate) fn fd_support(o: &dyn GaugeOracle, z: &[C], p: f64) -> Vec<C> {
    let n = z.len();
    let h = 1e-6 * norm(z).max(1e-12);
    let mut w = vec![C::new(0.0, 0.0); n];
    let mut zz = z.to_vec();
    for j in 0..n {
        let orig = zz[j];
        zz[j] = orig + h;
        let px = o.gauge(&zz);
        zz[j] = orig - h;
        let mx = o.gauge(&zz);
        zz[j] = orig + C::new(0.0, h);
        let py = o.gauge(&zz);
        zz[j] = orig - C::new(0.0, h);
        let my = o.gauge(&zz);
        zz[j] = orig;
        // Re(dz . w) = dx Re w - dy Im w
        w[j] = C::new((px - mx) / (2.0 * h), -(py - my) / (2.0 * h));
    }
    let e = pairing(z, &w).re;
    if e > 0.0 {
        for c in &mut w {
            *c *= p / e;
        }
    }
    w
}

pub(crate) fn support(o: &dyn GaugeOracle, z: &[C], p: f64) -> Vec<C> {
    match o.support(z) {
        Some(w) => w,
        None => fd_support(o, z, p),
    }
}

/// `sup Re(z . w)` over the body as `1 / min { p(z) : Re(z . w) = 1 }`,
/// minimized by BFGS on the hyperplane.
///
/// Returns `(value, maximizer, residual)`, where the residual
/// `|w - R s(u)| / |w|` with `R = Re(u . w) / p(u)` measures the
/// first-order optimality condition.
pub(crate) fn dual(o: &dyn GaugeOracle, w: &[C]) -> (f64, Vec<C>, f64) {
    let n = w.len();
    let nw = norm(w);
    if nw == 0.0 {
        return (0.0, vec![C::new(0.0, 0.0); n], 0.0);
    }
    let dim = 2 * n;
    // Re(z . w) = a . x with x = (Re z_1, Im z_1, ...)
    let a = DVector::from_iterator(dim, w.iter().flat_map(|c| [c.re, -c.im]));
    let proj = DMatrix::identity(dim, dim) - &a * a.transpose() / a.norm_squared();
    let to_c = |x: &DVector<f64>| -> Vec<C> { (0..n).map(|j| C::new(x[2 * j], x[2 * j + 1])).collect() };
    let grad = |x: &DVector<f64>, p: f64| -> DVector<f64> {
        let s = support(o, &to_c(x), p);
        DVector::from_iterator(dim, s.iter().flat_map(|c| [c.re, -c.im]))
    };
    let mut x = &a / a.norm_squared();
    let mut fx = o.gauge(&to_c(&x));
    let mut g = &proj * grad(&x, fx);
    let mut h = proj.clone();
    for _ in 0..500 {
        if g.norm() <= 1e-13 * (1.0 + fx) {
            break;
        }
        let d = -(&h * &g);
        let slope = g.dot(&d);
        if slope >= 0.0 {
            h = proj.clone();
            continue;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &d * t;
            let fnew = o.gauge(&to_c(&xn));
            if fnew <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gn = &proj * grad(&xn, fnew);
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * (1.0 + rho * yhy)) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        let done = (fx - fnew).abs() <= 1e-16 * fx;
        x = xn;
        fx = fnew;
        g = gn;
        if done {
            break;
        }
    }
    let z = to_c(&x);
    let sup = support(o, &z, fx);
    let r = 1.0 / fx;
    let diff: Vec<C> = w.iter().zip(&sup).map(|(a, b)| a - b * r).collect();
    let point: Vec<C> = z.iter().map(|c| c / fx).collect();
    (r, point, norm(&diff) / nw)
}
