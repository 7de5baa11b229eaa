//! Polytopes `{z : Re(z . w_i) <= 1}` given by facet functionals.

use crate::conic::{Affine, ConicBuilder, ConicTolerances};
use crate::error::{Error, Result};
use crate::{pairing, C};

pub(crate) fn gauge(functionals: &[Vec<C>], z: &[C]) -> f64 {
    functionals
        .iter()
        .map(|w| pairing(z, w).re)
        .fold(0.0, f64::max)
}

/// Index of the active facet: the largest value, lowest index among ties.
pub(crate) fn active_facet(functionals: &[Vec<C>], z: &[C]) -> usize {
    let vals: Vec<f64> = functionals.iter().map(|w| pairing(z, w).re).collect();
    let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1e-300);
    vals.iter().position(|&v| v >= best - tol).unwrap_or(0)
}

/// `max Re(z . w)` over the polytope, with a maximizer.
pub(crate) fn support_value(functionals: &[Vec<C>], w: &[C]) -> Result<(f64, Vec<C>)> {
    let n = w.len();
    let mut b = ConicBuilder::new();
    let vars = b.add_vars(2 * n);
    // z_j = x_j + i y_j; Re(z . w) = sum x_j Re w_j - y_j Im w_j
    for j in 0..n {
        b.set_cost(vars.start + 2 * j, -w[j].re);
        b.set_cost(vars.start + 2 * j + 1, w[j].im);
    }
    let rows: Vec<Affine> = functionals
        .iter()
        .map(|wk| {
            let mut e = Affine::constant(1.0);
            for j in 0..n {
                e.add_term(vars.start + 2 * j, -wk[j].re);
                e.add_term(vars.start + 2 * j + 1, wk[j].im);
            }
            e
        })
        .collect();
    b.nonneg(&rows);
    let tol = ConicTolerances { gap_abs: 1e-12, gap_rel: 1e-12, feas: 1e-12, max_iter: 200 };
    let sol = b.solve(tol)?;
    let z: Vec<C> = (0..n)
        .map(|j| C::new(sol.x[2 * j], sol.x[2 * j + 1]))
        .collect();
    // clean the maximizer onto the boundary and recompute the value exactly
    let pz = gauge(functionals, &z);
    let z: Vec<C> = if pz > 0.0 { z.iter().map(|c| c / pz).collect() } else { z };
    let value = pairing(&z, w).re;
    Ok((value, z))
}

/// Checks that the polytope is bounded; returns a Euclidean outer radius.
pub(crate) fn outer_radius(functionals: &[Vec<C>], n: usize) -> Result<f64> {
    let mut sq = 0.0;
    for j in 0..n {
        for unit in [C::new(1.0, 0.0), C::new(0.0, 1.0)] {
            let mut extent = 0.0f64;
            for sign in [1.0, -1.0] {
                let mut w = vec![C::new(0.0, 0.0); n];
                // Re(z . w) picks Re z_j for w = 1 and -Im z_j for w = i
                w[j] = unit * sign;
                let v = support_value(functionals, &w)
                    .map_err(|_| Error::InvalidBody("polytope is unbounded".into()))?
                    .0;
                if !v.is_finite() || v > 1e9 {
                    return Err(Error::InvalidBody("polytope is unbounded".into()));
                }
                extent = extent.max(v);
            }
            sq += extent * extent;
        }
    }
    Ok(sq.sqrt())
}
