//! Kobayashi metric and distance with certified two-sided bounds, and the
//! Carathéodory lower bound from the retraction.
//!
//! For the metric, `m(lambda)` (the discrete extremal value for the jets
//! `f(0) = a`, `f'(0) = lambda v`) is convex with `m(0) = p(a)`, and
//! `K(a; v) = 1 / lambda*` where `m(lambda*) = 1`. A primal value `U` at
//! `lambda` gives `lambda* >= lambda min(1, (1 - p(a)) / (U - p(a)))`; a dual
//! lower bound `L` gives `lambda* <= lambda max(1, (1 - p(a)) / (L - p(a)))`.
//!
//! For the distance, `m(t)` (jets `f(0) = a`, `f(t) = b`) is nonincreasing,
//! `tanh K(a, b) = t*` with `m(t*) = 1`; `U(t) <= 1` gives `t* <= t` and
//! `L(t) >= 1` gives `t* >= t`.

use crate::disc::{DiscPoly, JetData};
use crate::dual::{build_stationary, solve_dual, DualCertificate, DualOptions};
use crate::error::{Error, Result};
use crate::gauge::ConvexBody;
use crate::primal::{solve_primal, PrimalOptions, PrimalSolution, SolverBackend};
use crate::retraction::FlatteningMap;
use crate::sampling;
use crate::{norm, pairing, C};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct MetricOptions {
    pub degree: usize,
    pub grid: Option<usize>,
    /// Dual numerator degree; defaults to `degree`.
    pub dual_degree: Option<usize>,
    pub tol_primal: f64,
    /// Target `|m - 1|` of the root search.
    pub tol_m: f64,
    /// Relative width of the final parameter bracket.
    pub param_tol: f64,
    pub max_evals: usize,
    pub backend: SolverBackend,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            degree: 32,
            grid: None,
            dual_degree: None,
            tol_primal: 1e-6,
            tol_m: 1e-4,
            param_tol: 1e-6,
            max_evals: 60,
            backend: SolverBackend::Auto,
        }
    }
}

impl MetricOptions {
    fn primal(&self) -> PrimalOptions {
        PrimalOptions {
            degree: self.degree,
            grid: self.grid,
            tol: self.tol_primal,
            backend: self.backend,
            ..PrimalOptions::default()
        }
    }

    fn dual(&self) -> DualOptions {
        let k = self.dual_degree.unwrap_or(self.degree);
        DualOptions {
            degree: k,
            grid: Some(self.grid.unwrap_or(8 * self.degree).max(8 * k)),
            tol: self.tol_primal,
            backend: self.backend,
            ..DualOptions::default()
        }
    }
}

/// One evaluation of the root search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TracePoint {
    pub param: f64,
    pub primal: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricQuery {
    Metric { a: Vec<C>, v: Vec<C> },
    Distance { a: Vec<C>, b: Vec<C> },
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricResult {
    pub query: MetricQuery,
    pub upper: f64,
    pub lower: f64,
    /// Disc at the evaluated parameter closest to the root.
    pub extremal_disc: DiscPoly,
    /// Parameter (`lambda` or `t`) of `extremal_disc`.
    pub extremal_param: f64,
    pub extremal_primal: Option<PrimalSolution>,
    /// Dual solution at the extremal parameter.
    pub certificate: Option<DualCertificate>,
    pub trace: Vec<TracePoint>,
    /// Closed-form value (zero vector or coincident points).
    pub exact: bool,
    pub trace_monotone: bool,
    pub converged: bool,
    pub solver_iterations: usize,
}

impl MetricResult {
    fn exact_zero(query: MetricQuery, a: &[C]) -> Self {
        MetricResult {
            query,
            upper: 0.0,
            lower: 0.0,
            extremal_disc: DiscPoly::constant(a),
            extremal_param: 0.0,
            extremal_primal: None,
            certificate: None,
            trace: Vec::new(),
            exact: true,
            trace_monotone: true,
            converged: true,
            solver_iterations: 0,
        }
    }
}

struct Evaluated {
    param: f64,
    sol: PrimalSolution,
}

fn check_point(body: &ConvexBody, z: &[C]) -> Result<f64> {
    let p = body.gauge_eval(z)?;
    if p >= 1.0 {
        return Err(Error::OutsideDomain { gauge: p });
    }
    Ok(p)
}

/// Infinitesimal Kobayashi metric `K(a; v)` with certified bounds.
pub fn kobayashi_metric(body: &ConvexBody, a: &[C], v: &[C], opts: &MetricOptions) -> Result<MetricResult> {
    let pa = check_point(body, a)?;
    body.check_vector(v)?;
    let query = MetricQuery::Metric { a: a.to_vec(), v: v.to_vec() };
    if norm(v) == 0.0 {
        return Ok(MetricResult::exact_zero(query, a));
    }
    let popts = opts.primal();
    let eval = |lambda: f64| -> Result<PrimalSolution> {
        let lv: Vec<C> = v.iter().map(|x| x * lambda).collect();
        let (div, jets) = JetData::metric(a, &lv)?;
        solve_primal(body, &div, &jets, &popts)
    };
    let mut evals: Vec<Evaluated> = Vec::new();
    let pv = body.gauge_unchecked(v);
    // the straight disc a + lambda v zeta stays inside up to this lambda
    let lam0 = (1.0 - pa) / pv * 0.999;
    let s0 = eval(lam0)?;
    let mut lo = (lam0, s0.value);
    evals.push(Evaluated { param: lam0, sol: s0 });
    // convexity: the chord from (0, p(a)) extended past lo stays below m
    let mut hi: Option<(f64, f64)> = None;
    let mut next = if lo.1 > pa { lam0 * (1.0 - pa) / (lo.1 - pa) } else { 2.0 * lam0 };
    let mut side = 0i32;
    while evals.len() < opts.max_evals {
        let s = eval(next)?;
        let u = s.value;
        evals.push(Evaluated { param: next, sol: s });
        if (u - 1.0).abs() <= 1e-10 {
            break;
        }
        if u < 1.0 {
            lo = (next, u);
            if side == -1 {
                if let Some(h) = hi.as_mut() {
                    h.1 = 1.0 + (h.1 - 1.0) / 2.0;
                }
            }
            side = -1;
        } else {
            hi = Some((next, u));
            if side == 1 {
                lo.1 = 1.0 + (lo.1 - 1.0) / 2.0;
            }
            side = 1;
        }
        let Some(h) = hi else {
            let grow = if u > pa { next * (1.0 - pa) / (u - pa) } else { 2.0 * next };
            next = grow.max(next * 1.01);
            continue;
        };
        let width = h.0 - lo.0;
        if width <= opts.param_tol * h.0 && evals.iter().any(|e| (e.sol.value - 1.0).abs() <= opts.tol_m) {
            break;
        }
        // Illinois regula falsi on U - 1
        next = lo.0 + (1.0 - lo.1) * (h.0 - lo.0) / (h.1 - lo.1);
        if !(next > lo.0 && next < h.0) {
            next = 0.5 * (lo.0 + h.0);
        }
    }
    finish_metric(body, a, v, pa, query, evals, opts)
}

fn finish_metric(
    body: &ConvexBody,
    a: &[C],
    v: &[C],
    pa: f64,
    query: MetricQuery,
    evals: Vec<Evaluated>,
    opts: &MetricOptions,
) -> Result<MetricResult> {
    let mut lam_low = 0.0f64;
    for e in &evals {
        let u = e.sol.value;
        let bound = if u <= 1.0 { e.param } else { e.param * (1.0 - pa) / (u - pa) };
        lam_low = lam_low.max(bound);
    }
    let best = evals
        .iter()
        .min_by(|x, y| (x.sol.value - 1.0).abs().total_cmp(&(y.sol.value - 1.0).abs()))
        .expect("at least one evaluation");
    let lam_c = best.param;
    let lv: Vec<C> = v.iter().map(|x| x * lam_c).collect();
    let (div, jets) = JetData::metric(a, &lv)?;
    let cert = solve_dual(body, &div, &jets, &opts.dual())?;
    let mut lam_high = f64::INFINITY;
    if let Some(l) = cert.lower_bound {
        if l > pa {
            lam_high = lam_c * ((1.0 - pa) / (l - pa)).max(1.0);
        }
    }
    let trace: Vec<TracePoint> = evals
        .iter()
        .map(|e| TracePoint { param: e.param, primal: e.sol.value, converged: e.sol.converged })
        .collect();
    let monotone = is_monotone(&trace, true);
    let converged = evals.iter().all(|e| e.sol.converged) && cert.converged;
    let iterations = evals.iter().map(|e| e.sol.iterations).sum::<usize>() + cert.iterations;
    Ok(MetricResult {
        query,
        upper: 1.0 / lam_low,
        lower: if lam_high.is_finite() { 1.0 / lam_high } else { 0.0 },
        extremal_disc: best.sol.f.clone(),
        extremal_param: lam_c,
        extremal_primal: Some(best.sol.clone()),
        certificate: Some(cert),
        trace,
        exact: false,
        trace_monotone: monotone,
        converged,
        solver_iterations: iterations,
    })
}

/// `increasing`: values should grow with the parameter.
fn is_monotone(trace: &[TracePoint], increasing: bool) -> bool {
    let mut pts: Vec<(f64, f64)> = trace.iter().map(|t| (t.param, t.primal)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| {
        let d = w[1].1 - w[0].1;
        if increasing {
            d >= -1e-7
        } else {
            d <= 1e-7
        }
    })
}

/// Kobayashi distance `K(a, b)` with certified bounds.
pub fn kobayashi_distance(body: &ConvexBody, a: &[C], b: &[C], opts: &MetricOptions) -> Result<MetricResult> {
    check_point(body, a)?;
    check_point(body, b)?;
    let query = MetricQuery::Distance { a: a.to_vec(), b: b.to_vec() };
    let diff: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if norm(&diff) == 0.0 {
        return Ok(MetricResult::exact_zero(query, a));
    }
    let popts = opts.primal();
    let eval = |t: f64| -> Result<PrimalSolution> {
        let (div, jets) = JetData::distance(a, b, t)?;
        solve_primal(body, &div, &jets, &popts)
    };
    let t_max = crate::dual::MAX_NODE_MODULUS;
    let mut evals: Vec<Evaluated> = Vec::new();
    // lo: U > 1 (root above), hi: U <= 1 (root below)
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut t = 0.5;
    while lo.is_none() || hi.is_none() {
        if evals.len() >= opts.max_evals {
            return Err(Error::Solver("distance bracket search did not terminate".into()));
        }
        let s = eval(t)?;
        let u = s.value;
        evals.push(Evaluated { param: t, sol: s });
        if u > 1.0 {
            lo = Some((t, u));
            if hi.is_none() {
                if t >= t_max {
                    return Err(Error::NodeNearBoundary { modulus: t });
                }
                t = (0.5 * (t + 1.0)).min(t_max);
            }
        } else {
            hi = Some((t, u));
            if lo.is_none() {
                t *= 0.5;
            }
        }
    }
    let (mut lo, mut hi) = (lo.unwrap(), hi.unwrap());
    // widest bracket, for a slope estimate of m near the root
    let wide = (lo, hi);
    let mut side = 0i32;
    let mut nudge: Option<f64> = None;
    while evals.len() < opts.max_evals && hi.0 - lo.0 > opts.param_tol * hi.0 {
        let mut t = nudge.take().unwrap_or_else(|| lo.0 + (lo.1 - 1.0) * (hi.0 - lo.0) / (lo.1 - hi.1));
        if !(t > lo.0 && t < hi.0) {
            t = 0.5 * (lo.0 + hi.0);
        }
        let s = eval(t)?;
        let u = s.value;
        evals.push(Evaluated { param: t, sol: s });
        if u > 1.0 {
            lo = (t, u);
            if side == 1 {
                hi.1 = 1.0 - (1.0 - hi.1) / 2.0;
            }
            side = 1;
        } else {
            hi = (t, u);
            if side == -1 {
                lo.1 = 1.0 + (lo.1 - 1.0) / 2.0;
            }
            side = -1;
        }
        if (u - 1.0).abs() <= 1e-12 {
            // on the root: close the bracket from the other side
            let d = 0.45 * opts.param_tol * t;
            nudge = Some(if u > 1.0 { t + d } else { t - d });
        }
    }
    let mut trace: Vec<TracePoint> = evals
        .iter()
        .map(|e| TracePoint { param: e.param, primal: e.sol.value, converged: e.sol.converged })
        .collect();
    let monotone = is_monotone(&trace, false);
    if !monotone {
        golden_section(&eval, &mut evals, lo.0, hi.0, opts.max_evals)?;
        trace = evals
            .iter()
            .map(|e| TracePoint { param: e.param, primal: e.sol.value, converged: e.sol.converged })
            .collect();
    }
    let t_high = evals
        .iter()
        .filter(|e| e.sol.value <= 1.0)
        .map(|e| e.param)
        .fold(f64::INFINITY, f64::min);
    // certify the lower end with dual bounds, stepping down when needed
    let dopts = opts.dual();
    let mut t_low = 0.0;
    let mut cert_low: Option<DualCertificate> = None;
    let mut dual_iters = 0;
    let below: Vec<f64> = {
        let mut v: Vec<f64> = evals.iter().filter(|e| e.sol.value > 1.0).map(|e| e.param).collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    };
    let slope = ((wide.0 .1 - wide.1 .1) / (wide.1 .0 - wide.0 .0)).max(1e-12);
    let mut candidate = below.first().copied();
    let mut factor = 2.0;
    for _ in 0..16 {
        let Some(tc) = candidate else { break };
        if tc <= 0.0 {
            break;
        }
        let (div, jets) = JetData::distance(a, b, tc)?;
        let cert = solve_dual(body, &div, &jets, &dopts)?;
        dual_iters += cert.iterations;
        match cert.lower_bound {
            Some(l) if l >= 1.0 => {
                t_low = tc;
                cert_low = Some(cert);
                break;
            }
            // step below by the estimated parameter shift, growing on retries
            Some(l) => candidate = Some(tc - (factor * (1.0 - l) / slope).max(1e-3 * opts.param_tol * tc)),
            None => candidate = Some(tc - factor * opts.param_tol * tc),
        }
        factor *= 4.0;
    }
    let best = evals
        .iter()
        .filter(|e| e.sol.value <= 1.0)
        .min_by(|x, y| x.param.total_cmp(&y.param))
        .or_else(|| evals.first())
        .expect("at least one evaluation");
    let converged = evals.iter().all(|e| e.sol.converged) && cert_low.is_some();
    let iterations = evals.iter().map(|e| e.sol.iterations).sum::<usize>() + dual_iters;
    Ok(MetricResult {
        query,
        upper: t_high.min(1.0 - 1e-16).atanh(),
        lower: t_low.atanh(),
        extremal_disc: best.sol.f.clone(),
        extremal_param: best.param,
        extremal_primal: Some(best.sol.clone()),
        certificate: cert_low,
        trace,
        exact: false,
        trace_monotone: monotone,
        converged,
        solver_iterations: iterations,
    })
}

fn golden_section(
    eval: &dyn Fn(f64) -> Result<PrimalSolution>,
    evals: &mut Vec<Evaluated>,
    mut lo: f64,
    mut hi: f64,
    budget: usize,
) -> Result<()> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let add = |t: f64, evals: &mut Vec<Evaluated>| -> Result<f64> {
        let s = eval(t)?;
        let d = (s.value - 1.0).abs();
        evals.push(Evaluated { param: t, sol: s });
        Ok(d)
    };
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = add(x1, evals)?;
    let mut f2 = add(x2, evals)?;
    for _ in 0..budget.min(40) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = add(x1, evals)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = add(x2, evals)?;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Ok(())
}

/// Poincaré distance `artanh |(z1 - z2) / (1 - conj(z1) z2)|` on the unit disc.
pub fn poincare_distance(z1: C, z2: C) -> Result<f64> {
    if z1.norm() >= 1.0 || z2.norm() >= 1.0 {
        return Err(Error::OutsideDomain { gauge: z1.norm().max(z2.norm()) });
    }
    let r = ((z1 - z2) / (C::new(1.0, 0.0) - z1.conj() * z2)).norm();
    Ok(r.min(1.0 - 1e-16).atanh())
}

/// A Carathéodory lower bound `|g'(a) v| / (1 - |g(a)|^2)` from a candidate
/// `g : domain -> D`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CaratheodoryBound {
    pub value: f64,
    /// Linear candidates were used instead of the retraction.
    pub weak: bool,
    /// The candidate stayed inside the unit disc on every sample point.
    pub verified: bool,
    /// Largest `|g|` over the sample points.
    pub sampled_sup: f64,
}

/// Carathéodory lower bound from the retraction candidate, or from linear
/// functionals when no flattening map is given.
pub fn caratheodory_lower(
    body: &ConvexBody,
    a: &[C],
    v: &[C],
    flat: Option<&FlatteningMap>,
    samples: usize,
    seed: u64,
) -> Result<CaratheodoryBound> {
    check_point(body, a)?;
    body.check_vector(v)?;
    if norm(v) == 0.0 {
        return Ok(CaratheodoryBound { value: 0.0, weak: flat.is_none(), verified: true, sampled_sup: 0.0 });
    }
    if let Some(map) = flat {
        if let Ok(b) = retraction_bound(body, a, v, map, samples, seed) {
            return Ok(b);
        }
    }
    Ok(linear_bound(body, a, v, seed))
}

fn retraction_bound(
    body: &ConvexBody,
    a: &[C],
    v: &[C],
    map: &FlatteningMap,
    samples: usize,
    seed: u64,
) -> Result<CaratheodoryBound> {
    let ca = map.caratheodory_candidate(a)?;
    let dv = map.candidate_derivative(a, v)?;
    let mut sup = 0.0f64;
    let mut verified = true;
    for z in &sample_points(body, samples, seed) {
        match map.caratheodory_candidate(z) {
            Ok(c) => sup = sup.max(c.norm()),
            Err(_) => verified = false,
        }
    }
    Ok(CaratheodoryBound {
        value: dv.norm() / (1.0 - ca.norm_sqr()),
        weak: false,
        verified: verified && sup < 1.0,
        sampled_sup: sup,
    })
}

// Candidates built from supporting functionals `w` with `p*(w) = 1`:
// `z . w` maps circled bodies into D, `Re(z . w) < 1` a half-plane otherwise.
fn linear_bound(body: &ConvexBody, a: &[C], v: &[C], seed: u64) -> CaratheodoryBound {
    let mut dirs: Vec<Vec<C>> = vec![v.to_vec()];
    if norm(a) > 0.0 {
        dirs.push(a.to_vec());
    }
    dirs.extend(sampling::sphere_samples(body.dim(), 64, seed ^ 0x11));
    let mut best = 0.0f64;
    let mut sup = 0.0f64;
    for d in dirs {
        let Ok(w) = body.supporting_functional(&d) else { continue };
        let w = w.w;
        let la = pairing(a, &w);
        let lv = pairing(v, &w).norm();
        let (val, at_a) = if body.is_circled() {
            (lv / (1.0 - la.norm_sqr()), la.norm())
        } else {
            // Cayley map of the half-plane, centred at a
            let s = 1.0 - la.re;
            (lv / (2.0 * s), 0.0)
        };
        sup = sup.max(at_a);
        best = best.max(val);
    }
    CaratheodoryBound { value: best, weak: true, verified: true, sampled_sup: sup }
}

fn sample_points(body: &ConvexBody, count: usize, seed: u64) -> Vec<Vec<C>> {
    let mut rng = sampling::rng(seed);
    let n = body.dim();
    (0..count)
        .map(|i| {
            let u = sampling::on_sphere(&mut rng, n);
            // every fourth point sits just inside the boundary
            let r = if i % 4 == 0 {
                0.9999
            } else {
                rand::Rng::random::<f64>(&mut rng).powf(1.0 / (2.0 * n as f64)) * 0.999
            };
            let p = body.gauge_unchecked(&u);
            u.iter().map(|c| c * (r / p)).collect()
        })
        .collect()
}

/// Comparison of the Kobayashi upper bound with the Carathéodory lower bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CkReport {
    pub k_upper: f64,
    pub k_lower: f64,
    pub c_lower: f64,
    pub difference: f64,
    /// Deviation of `f' . f~` from a constant; NaN when no pair was built.
    pub constancy_residual: f64,
    /// The retraction could not be built and linear candidates were used.
    pub weak: bool,
    pub failure: Option<String>,
    pub sampled_sup: f64,
    pub solver_iterations: usize,
    pub pass: bool,
}

/// Solve the metric problem, build the retraction from the extremal disc
/// and compare `K` with the Carathéodory bound of its candidate.
pub fn verify_ck_equality(
    body: &ConvexBody,
    a: &[C],
    v: &[C],
    opts: &MetricOptions,
    tol: f64,
) -> Result<CkReport> {
    let metric = kobayashi_metric(body, a, v, opts)?;
    if metric.exact {
        return Ok(CkReport {
            k_upper: 0.0,
            k_lower: 0.0,
            c_lower: 0.0,
            difference: 0.0,
            constancy_residual: 0.0,
            weak: false,
            failure: None,
            sampled_sup: 0.0,
            solver_iterations: 0,
            pass: true,
        });
    }
    let cert = metric.certificate.as_ref().expect("metric queries carry a certificate");
    let mut residual = f64::NAN;
    let map = build_stationary(&metric.extremal_disc, &cert.h, 1e-4).and_then(|pair| {
        residual = pair.constancy_residual;
        FlatteningMap::new(pair)
    });
    let (c, failure) = match &map {
        Ok(m) => match retraction_bound(body, a, v, m, 64, 0xcafe) {
            Ok(b) => (b, None),
            Err(e) => (linear_bound(body, a, v, 0xcafe), Some(e.to_string())),
        },
        Err(e) => (linear_bound(body, a, v, 0xcafe), Some(e.to_string())),
    };
    let difference = metric.upper - c.value;
    Ok(CkReport {
        k_upper: metric.upper,
        k_lower: metric.lower,
        c_lower: c.value,
        difference,
        constancy_residual: residual,
        weak: c.weak,
        failure,
        sampled_sup: c.sampled_sup,
        solver_iterations: metric.solver_iterations,
        pass: difference <= tol && c.verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn poincare_examples() {
        assert!((poincare_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert_eq!(poincare_distance(c(0.3, 0.1), c(0.3, 0.1)).unwrap(), 0.0);
        assert!(poincare_distance(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn zero_vector_is_exact() {
        let body = ConvexBody::ball(2).unwrap();
        let r = kobayashi_metric(&body, &[c(0.1, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0); 2], &MetricOptions::default())
            .unwrap();
        assert!(r.exact && r.upper == 0.0 && r.lower == 0.0);
    }

    #[test]
    fn disc_metric_at_origin() {
        let body = ConvexBody::unit_disc();
        let opts = MetricOptions { degree: 8, ..Default::default() };
        let r = kobayashi_metric(&body, &[c(0.0, 0.0)], &[c(0.7, 0.2)], &opts).unwrap();
        let exact = c(0.7, 0.2).norm();
        assert!(r.lower <= exact + 1e-9 && exact <= r.upper + 1e-9, "{} {} {}", r.lower, exact, r.upper);
        assert!(r.upper - r.lower < 1e-6);
    }

    #[test]
    fn outside_point_rejected() {
        let body = ConvexBody::unit_disc();
        assert!(matches!(
            kobayashi_metric(&body, &[c(1.0, 0.0)], &[c(1.0, 0.0)], &MetricOptions::default()),
            Err(Error::OutsideDomain { .. })
        ));
    }
}
