//! Kelley cutting-plane method with a box trust region.
//!
//! Minimizes `F(x) = sum_b w_b F_b(x)` where each block `F_b` is convex and
//! reported through affine minorants (cuts), subject to linear equalities.
//! The master problem is an LP; when the LP solution does not touch the
//! box its value is a global lower bound on `min F`.

use crate::conic::{Affine, ConicBuilder, ConicTolerances};
use crate::error::Result;

/// `F_block(x) >= constant + grad . x` for all `x`.
#[derive(Debug, Clone)]
pub(crate) struct Cut {
    pub block: usize,
    pub constant: f64,
    pub grad: Vec<f64>,
}

impl Cut {
    fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.grad.iter().zip(x).map(|(g, v)| g * v).sum::<f64>()
    }
}

pub(crate) trait CutOracle {
    fn n_params(&self) -> usize;
    fn weights(&self) -> &[f64];
    /// Objective at `x`; appends cuts that are tight (or nearly) at `x`.
    fn evaluate(&self, x: &[f64], cuts: &mut Vec<Cut>) -> Result<f64>;
    /// A lower bound valid for every block value.
    fn block_floor(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub radius: f64,
    pub max_cuts: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct CpResult {
    pub x: Vec<f64>,
    pub lower: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn minimize(
    oracle: &dyn CutOracle,
    x0: Vec<f64>,
    equalities: &[(Vec<f64>, f64)],
    opts: &CpOptions,
) -> Result<CpResult> {
    let p = oracle.n_params();
    let weights = oracle.weights().to_vec();
    let nb = weights.len();
    let mut cuts: Vec<Cut> = Vec::new();
    let mut center = x0;
    let mut f_center = oracle.evaluate(&center, &mut cuts)?;
    let mut radius = opts.radius;
    let mut lower = f64::NEG_INFINITY;
    let basis = orthonormal_rows(equalities, p);
    let tol_lp = ConicTolerances { gap_abs: 1e-12, gap_rel: 1e-12, feas: 1e-12, max_iter: 200 };

    for iter in 1..=opts.max_iter {
        if f_center - lower <= opts.tol {
            return Ok(CpResult { x: center, lower, iterations: iter - 1, converged: true });
        }
        let master = solve_master(p, nb, &weights, &cuts, equalities, &center, radius, oracle.block_floor(), tol_lp);
        let (candidate, model) = match master {
            Ok((x, model, box_active)) => {
                if !box_active {
                    lower = lower.max(model);
                }
                (x, model)
            }
            Err(_) => {
                // Polyak step along an aggregated subgradient at the center
                let g = aggregate_subgradient(&cuts, &center, nb, &weights, p, &basis);
                let gn: f64 = g.iter().map(|v| v * v).sum();
                if gn == 0.0 {
                    return Ok(CpResult { x: center, lower: f_center, iterations: iter, converged: true });
                }
                let target = if lower.is_finite() { lower } else { f_center - radius * gn.sqrt() };
                let step = (f_center - target) / gn;
                let x: Vec<f64> = center.iter().zip(&g).map(|(c, gi)| c - step * gi).collect();
                (x, target)
            }
        };
        let predicted = f_center - model;
        if predicted <= 0.1 * opts.tol {
            // the model cannot improve within the box; enlarge it to certify
            radius *= 4.0;
            if radius > 1e8 {
                return Ok(CpResult { x: center, lower, iterations: iter, converged: false });
            }
            continue;
        }
        let mut new_cuts = Vec::new();
        let f_new = oracle.evaluate(&candidate, &mut new_cuts)?;
        cuts.extend(new_cuts);
        let actual = f_center - f_new;
        if actual >= 0.1 * predicted {
            center = candidate;
            f_center = f_new;
            if actual >= 0.5 * predicted {
                radius *= 2.0;
            }
        } else {
            radius = (radius * 0.5).max(1e-12);
        }
        if cuts.len() > opts.max_cuts {
            prune(&mut cuts, &center, opts.max_cuts);
        }
    }
    Ok(CpResult { x: center, lower, iterations: opts.max_iter, converged: false })
}

#[allow(clippy::too_many_arguments)]
fn solve_master(
    p: usize,
    nb: usize,
    weights: &[f64],
    cuts: &[Cut],
    equalities: &[(Vec<f64>, f64)],
    center: &[f64],
    radius: f64,
    floor: f64,
    tol: ConicTolerances,
) -> Result<(Vec<f64>, f64, bool)> {
    let mut b = ConicBuilder::new();
    let xs = b.add_vars(p);
    let ss = b.add_vars(nb);
    for (k, w) in weights.iter().enumerate() {
        b.set_cost(ss.start + k, *w);
    }
    let eqs: Vec<Affine> = equalities
        .iter()
        .map(|(a, rhs)| {
            let mut e = Affine::constant(-rhs);
            for (i, &ai) in a.iter().enumerate() {
                e.add_term(xs.start + i, ai);
            }
            e
        })
        .collect();
    b.zero(&eqs);
    let mut rows: Vec<Affine> = Vec::with_capacity(cuts.len() + 2 * p + nb);
    for c in cuts {
        let mut e = Affine::constant(-c.constant);
        e.add_term(ss.start + c.block, 1.0);
        for (i, &g) in c.grad.iter().enumerate() {
            e.add_term(xs.start + i, -g);
        }
        rows.push(e);
    }
    for k in 0..nb {
        let mut e = Affine::constant(-floor);
        e.add_term(ss.start + k, 1.0);
        rows.push(e);
    }
    for i in 0..p {
        let mut lo = Affine::constant(radius - center[i]);
        lo.add_term(xs.start + i, 1.0);
        let mut hi = Affine::constant(radius + center[i]);
        hi.add_term(xs.start + i, -1.0);
        rows.push(lo);
        rows.push(hi);
    }
    b.nonneg(&rows);
    let sol = b.solve(tol)?;
    let x = sol.x[xs.clone()].to_vec();
    // model value recomputed from the cuts at the LP point
    let mut block_val = vec![floor; nb];
    for c in cuts {
        block_val[c.block] = block_val[c.block].max(c.value(&x));
    }
    let model: f64 = block_val.iter().zip(weights).map(|(v, w)| v * w).sum();
    let box_active = x
        .iter()
        .zip(center)
        .any(|(xi, ci)| (xi - ci).abs() >= radius * (1.0 - 1e-6));
    Ok((x, model, box_active))
}

fn aggregate_subgradient(
    cuts: &[Cut],
    x: &[f64],
    nb: usize,
    weights: &[f64],
    p: usize,
    basis: &[Vec<f64>],
) -> Vec<f64> {
    let mut best: Vec<Option<(f64, &Cut)>> = vec![None; nb];
    for c in cuts {
        let v = c.value(x);
        if best[c.block].is_none_or(|(bv, _)| v > bv) {
            best[c.block] = Some((v, c));
        }
    }
    let mut g = vec![0.0; p];
    for (k, entry) in best.iter().enumerate() {
        if let Some((_, c)) = entry {
            for i in 0..p {
                g[i] += weights[k] * c.grad[i];
            }
        }
    }
    for row in basis {
        let d: f64 = row.iter().zip(&g).map(|(a, b)| a * b).sum();
        for i in 0..p {
            g[i] -= d * row[i];
        }
    }
    g
}

fn orthonormal_rows(equalities: &[(Vec<f64>, f64)], p: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (a, _) in equalities {
        let mut v = a.clone();
        v.resize(p, 0.0);
        for u in &out {
            let d: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
            for i in 0..p {
                v[i] -= d * u[i];
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Keep the `cap` cuts with the smallest slack at `x`, per block.
fn prune(cuts: &mut Vec<Cut>, x: &[f64], cap: usize) {
    let nb = cuts.iter().map(|c| c.block).max().map_or(0, |b| b + 1);
    let mut top = vec![f64::NEG_INFINITY; nb];
    for c in cuts.iter() {
        top[c.block] = top[c.block].max(c.value(x));
    }
    let mut keyed: Vec<(f64, Cut)> = cuts
        .drain(..)
        .map(|c| (top[c.block] - c.value(x), c))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.truncate(cap);
    cuts.extend(keyed.into_iter().map(|(_, c)| c));
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `max(|x0 - 1|, |x1 + 2|)` written with four cuts per evaluation.
    struct Linf;
    impl CutOracle for Linf {
        fn n_params(&self) -> usize {
            2
        }
        fn weights(&self) -> &[f64] {
            &[1.0]
        }
        fn evaluate(&self, x: &[f64], cuts: &mut Vec<Cut>) -> Result<f64> {
            let pieces = [
                (-1.0, vec![1.0, 0.0]),
                (1.0, vec![-1.0, 0.0]),
                (2.0, vec![0.0, 1.0]),
                (-2.0, vec![0.0, -1.0]),
            ];
            let mut best = f64::NEG_INFINITY;
            for (c, g) in pieces {
                let v = c + g[0] * x[0] + g[1] * x[1];
                best = best.max(v);
                cuts.push(Cut { block: 0, constant: c, grad: g });
            }
            Ok(best)
        }
    }

    #[test]
    fn polyhedral_minimum_found_exactly() {
        let opts = CpOptions { tol: 1e-9, max_iter: 50, radius: 0.5, max_cuts: 100 };
        let r = minimize(&Linf, vec![0.0, 0.0], &[], &opts).unwrap();
        assert!(r.converged);
        assert!(Linf.evaluate(&r.x, &mut Vec::new()).unwrap().abs() < 1e-9);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn equality_constrained() {
        // min max(|x0 - 1|, |x1 + 2|) s.t. x0 + x1 = 1 -> optimum 1 at (2, -1)
        let opts = CpOptions { tol: 1e-9, max_iter: 50, radius: 0.5, max_cuts: 100 };
        let r = minimize(&Linf, vec![0.5, 0.5], &[(vec![1.0, 1.0], 1.0)], &opts).unwrap();
        assert!(r.converged);
        assert!((Linf.evaluate(&r.x, &mut Vec::new()).unwrap() - 1.0).abs() < 1e-8);
    }
}
