//! The discretized primal problem
//! `m = min { max_i p(f(zeta_i)) : f = f0 + B q, deg f <= N }`.
//!
//! Bodies with a conic description are solved as one second-order /
//! power-cone program; oracle bodies (or an explicit request) use the
//! Kelley cutting-plane method. Every reported value is recomputed from
//! the returned disc with the crate's own gauge.

use crate::conic::{Affine, ConicBuilder, ConicTolerances};
use crate::cutting_plane::{self, CpOptions, Cut, CutOracle};
use crate::disc::{AffineDiscSpace, DiscPoly, Divisor, JetData};
use crate::error::{Error, Result};
use crate::gauge::{BodyKind, ConvexBody};
use crate::{pairing, unit_grid, C};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverBackend {
    /// Conic program when the body allows it, cutting planes otherwise.
    #[default]
    Auto,
    Conic,
    CuttingPlane,
}

#[derive(Debug, Clone)]
pub struct PrimalOptions {
    /// Disc degree `N`.
    pub degree: usize,
    /// Grid size `M`; defaults to `8 N`.
    pub grid: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub backend: SolverBackend,
}

impl Default for PrimalOptions {
    fn default() -> Self {
        PrimalOptions { degree: 32, grid: None, tol: 1e-6, max_iter: 400, backend: SolverBackend::Auto }
    }
}

impl PrimalOptions {
    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or(8 * self.degree)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimalSolution {
    pub f: DiscPoly,
    /// `P(f) = max_i p(f(zeta_i))`.
    pub value: f64,
    /// Lower bound on the discrete optimum reported by the solver.
    pub lower_bound: f64,
    /// `max_i |p(f(zeta_i)) - P(f)|`.
    pub flatness: f64,
    pub iterations: usize,
    pub converged: bool,
    pub backend: SolverBackend,
    pub grid: usize,
}

/// Gauge values `p(f(zeta_i))` on the `m`-point grid.
pub fn gauge_profile(body: &ConvexBody, f: &DiscPoly, m: usize) -> Result<Vec<f64>> {
    if f.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: f.dim() });
    }
    let vals = crate::disc::boundary_grid(f, m)?;
    Ok(vals.iter().map(|z| body.gauge_unchecked(z)).collect())
}

/// `P(f) = max_i p(f(zeta_i))`.
pub fn sup_gauge(body: &ConvexBody, f: &DiscPoly, m: usize) -> Result<f64> {
    Ok(gauge_profile(body, f, m)?.into_iter().fold(0.0, f64::max))
}

/// Values of `f0 + B q` on the grid as affine functions of the parameters.
pub(crate) struct GridModel {
    pub space: AffineDiscSpace,
    base: Vec<Vec<C>>,
    basis: Vec<Vec<C>>,
}

impl GridModel {
    pub fn new(space: AffineDiscSpace, m: usize) -> Self {
        let grid = unit_grid(m);
        let base = grid.iter().map(|&z| space.f0.eval(z)).collect();
        let basis = grid
            .iter()
            .map(|&z| {
                let bz = space.b.eval(z);
                let mut out = Vec::with_capacity(space.nq);
                let mut pw = C::new(1.0, 0.0);
                for _ in 0..space.nq {
                    out.push(bz * pw);
                    pw *= z;
                }
                out
            })
            .collect();
        GridModel { space, base, basis }
    }

    pub fn m(&self) -> usize {
        self.base.len()
    }

    pub fn value(&self, i: usize, x: &[f64]) -> Vec<C> {
        (0..self.space.n)
            .map(|j| {
                let mut v = self.base[i][j];
                for (k, e) in self.basis[i].iter().enumerate() {
                    let idx = self.space.index(j, k);
                    v += e * C::new(x[idx], x[idx + 1]);
                }
                v
            })
            .collect()
    }

    /// `(Re f_ij, Im f_ij)` as affine expressions, parameters at `offset`.
    pub fn re_im(&self, i: usize, j: usize, offset: usize) -> (Affine, Affine) {
        let b = self.base[i][j];
        let mut re = Affine::constant(b.re);
        let mut im = Affine::constant(b.im);
        for (k, e) in self.basis[i].iter().enumerate() {
            let idx = offset + self.space.index(j, k);
            re.add_term(idx, e.re);
            re.add_term(idx + 1, -e.im);
            im.add_term(idx, e.im);
            im.add_term(idx + 1, e.re);
        }
        (re, im)
    }

    /// `Re(f_i(x) . w) = constant + grad . x`.
    pub fn re_pairing(&self, i: usize, w: &[C]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.space.n_params()];
        let constant = pairing(&self.base[i], w).re;
        for j in 0..self.space.n {
            for (k, e) in self.basis[i].iter().enumerate() {
                let ew = e * w[j];
                let idx = self.space.index(j, k);
                grad[idx] = ew.re;
                grad[idx + 1] = -ew.im;
            }
        }
        (constant, grad)
    }
}

/// Solve the discretized primal problem.
pub fn solve_primal(
    body: &ConvexBody,
    div: &Divisor,
    jets: &JetData,
    opts: &PrimalOptions,
) -> Result<PrimalSolution> {
    if jets.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: jets.dim() });
    }
    let m = opts.grid_size();
    let required = 2 * opts.degree + 1;
    if m < required {
        return Err(Error::GridTooSmall { required, got: m });
    }
    let space = AffineDiscSpace::new(div, jets, opts.degree)?;
    let model = GridModel::new(space, m);
    let conic_ok = !matches!(body.kind(), BodyKind::Oracle(_));
    let backend = match opts.backend {
        SolverBackend::Auto if conic_ok => SolverBackend::Conic,
        SolverBackend::Auto => SolverBackend::CuttingPlane,
        SolverBackend::Conic if !conic_ok => {
            return Err(Error::InvalidArgument("oracle bodies have no conic description".into()))
        }
        b => b,
    };
    let (x, lower, iterations, engine_ok) = match backend {
        SolverBackend::Conic => {
            let (x, lower, it, ok) = solve_conic(body, &model, opts)?;
            (x, lower, it, ok)
        }
        _ => {
            let oracle = PrimalCuts { body, model: &model, weights: [1.0] };
            let cp = CpOptions {
                tol: opts.tol,
                max_iter: opts.max_iter,
                radius: 0.5,
                max_cuts: 40 * (model.space.n_params() + 1),
            };
            let r = cutting_plane::minimize(&oracle, vec![0.0; model.space.n_params()], &[], &cp)?;
            (r.x, r.lower, r.iterations, r.converged)
        }
    };
    let f = model.space.disc(&x);
    let profile = gauge_profile(body, &f, m)?;
    let value = profile.iter().cloned().fold(0.0, f64::max);
    let low = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let lower_bound = lower.min(value);
    Ok(PrimalSolution {
        f,
        value,
        lower_bound,
        flatness: value - low,
        iterations,
        converged: engine_ok && value - lower_bound <= opts.tol,
        backend,
        grid: m,
    })
}

fn solve_conic(
    body: &ConvexBody,
    model: &GridModel,
    opts: &PrimalOptions,
) -> Result<(Vec<f64>, f64, usize, bool)> {
    let n = model.space.n;
    let np = model.space.n_params();
    let mut b = ConicBuilder::new();
    let xs = b.add_vars(np);
    let t = b.add_var();
    b.set_cost(t, 1.0);
    let off = xs.start;
    match body.kind() {
        BodyKind::Ball => {
            for i in 0..model.m() {
                let mut row = vec![Affine::var(t)];
                for j in 0..n {
                    let (re, im) = model.re_im(i, j, off);
                    row.push(re);
                    row.push(im);
                }
                b.soc(&row);
            }
        }
        BodyKind::Polydisc { radii } => {
            for i in 0..model.m() {
                for (j, r) in radii.iter().enumerate() {
                    let (re, im) = model.re_im(i, j, off);
                    b.soc(&[Affine::scaled_var(t, *r), re, im]);
                }
            }
        }
        BodyKind::ComplexEllipsoid { exponents, radii } => {
            // |f_ij| <= s_ij, (u_ij, t, s_ij / r_j) in K_pow(1/(2 m_j)), sum_j u_ij <= t
            for i in 0..model.m() {
                let mut budget = Affine::var(t);
                for j in 0..n {
                    let s = b.add_var();
                    let (re, im) = model.re_im(i, j, off);
                    b.soc(&[Affine::var(s), re, im]);
                    let m = exponents[j];
                    if (m - 0.5).abs() <= 1e-12 {
                        budget.add_term(s, -1.0 / radii[j]);
                    } else {
                        let u = b.add_var();
                        b.power(
                            Affine::var(u),
                            Affine::var(t),
                            Affine::scaled_var(s, 1.0 / radii[j]),
                            1.0 / (2.0 * m),
                        );
                        budget.add_term(u, -1.0);
                    }
                }
                b.nonneg(&[budget]);
            }
        }
        BodyKind::Polyhedral { functionals } => {
            let mut rows = Vec::with_capacity(model.m() * functionals.len());
            for i in 0..model.m() {
                for w in functionals {
                    let (c, g) = model.re_pairing(i, w);
                    let mut e = Affine::constant(-c);
                    e.add_term(t, 1.0);
                    for (k, gk) in g.iter().enumerate() {
                        e.add_term(off + k, -gk);
                    }
                    rows.push(e);
                }
            }
            b.nonneg(&rows);
        }
        BodyKind::Oracle(_) => unreachable!("dispatched to cutting planes"),
    }
    let tol = ConicTolerances {
        gap_abs: (opts.tol * 1e-4).max(1e-12),
        gap_rel: (opts.tol * 1e-4).max(1e-12),
        feas: 1e-11,
        max_iter: opts.max_iter.min(u32::MAX as usize) as u32,
    };
    let sol = b.solve(tol)?;
    Ok((sol.x[xs].to_vec(), sol.obj_dual, sol.iterations, true))
}

struct PrimalCuts<'a> {
    body: &'a ConvexBody,
    model: &'a GridModel,
    weights: [f64; 1],
}

impl CutOracle for PrimalCuts<'_> {
    fn n_params(&self) -> usize {
        self.model.space.n_params()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn evaluate(&self, x: &[f64], cuts: &mut Vec<Cut>) -> Result<f64> {
        let m = self.model.m();
        let vals: Vec<Vec<C>> = (0..m).map(|i| self.model.value(i, x)).collect();
        let p: Vec<f64> = vals.iter().map(|z| self.body.gauge_unchecked(z)).collect();
        let top = p.iter().cloned().fold(0.0, f64::max);
        // the bundle of near-maximal points plus the largest local maxima
        let mut chosen: Vec<usize> = (0..m).filter(|&i| p[i] >= top - 1e-9 * top.max(1.0)).collect();
        let mut peaks: Vec<usize> = (0..m)
            .filter(|&i| p[i] >= p[(i + m - 1) % m] && p[i] >= p[(i + 1) % m])
            .collect();
        peaks.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
        chosen.extend(peaks.into_iter().take(16));
        chosen.sort_unstable();
        chosen.dedup();
        for i in chosen {
            if p[i] == 0.0 {
                continue;
            }
            let w = self.body.support_unchecked(&vals[i], p[i]);
            let (constant, grad) = self.model.re_pairing(i, &w);
            cuts.push(Cut { block: 0, constant, grad });
        }
        Ok(top)
    }
}
