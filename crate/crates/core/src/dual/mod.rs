//! Dual elements `h = zeta q / (B E)` and optimality certificates.
//!
//! `B` is the divisor polynomial and `E` an outer factor without zeros on
//! the closed disc, so every `h` annihilates discs whose jets vanish on the
//! divisor. The pairing with a disc is evaluated exactly by residues at the
//! nodes; the dual norm `(1/M) sum p*(h(zeta_i))` is evaluated on the grid.

mod multiplier;

pub use multiplier::{divisor_multiplier, Multiplier};

use crate::conic::{Affine, ConicBuilder, ConicTolerances};
use crate::cutting_plane::{self, CpOptions, Cut, CutOracle};
use crate::disc::{disc_jet, DiscPoly, Divisor, JetData};
use crate::error::{Error, Result};
use crate::gauge::{BodyKind, ConvexBody};
use crate::poly::{series_mul, series_reciprocal, Poly};
use crate::primal::{gauge_profile, SolverBackend};
use crate::{pairing, unit_grid, C};
use serde::{Deserialize, Serialize};

/// Largest node modulus accepted by the dual evaluation routines.
pub const MAX_NODE_MODULUS: f64 = 0.99;

/// `h(zeta) = zeta q(zeta) / (B(zeta) E(zeta))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DualElementRaw", try_from = "DualElementRaw")]
pub struct DualElement {
    divisor: Divisor,
    b: Poly,
    numerator: DiscPoly,
    outer: Poly,
}

#[derive(Serialize, Deserialize)]
struct DualElementRaw {
    divisor: Divisor,
    numerator: DiscPoly,
    outer: Poly,
}

impl From<DualElement> for DualElementRaw {
    fn from(h: DualElement) -> Self {
        DualElementRaw { divisor: h.divisor, numerator: h.numerator, outer: h.outer }
    }
}

impl TryFrom<DualElementRaw> for DualElement {
    type Error = Error;

    fn try_from(raw: DualElementRaw) -> Result<Self> {
        DualElement::new(raw.divisor, raw.numerator, raw.outer)
    }
}

impl DualElement {
    pub fn new(divisor: Divisor, numerator: DiscPoly, outer: Poly) -> Result<Self> {
        for z in unit_grid(64) {
            if outer.eval(z).norm() == 0.0 {
                return Err(Error::InvalidArgument("outer factor vanishes on the circle".into()));
            }
        }
        if outer.eval(C::new(0.0, 0.0)).norm() == 0.0 {
            return Err(Error::InvalidArgument("outer factor vanishes at 0".into()));
        }
        let b = divisor.poly();
        Ok(DualElement { divisor, b, numerator, outer })
    }

    /// Element with a polynomial numerator and `E = 1`.
    pub fn polynomial(divisor: Divisor, numerator: DiscPoly) -> Self {
        let b = divisor.poly();
        DualElement { divisor, b, numerator, outer: Poly::one() }
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn numerator(&self) -> &DiscPoly {
        &self.numerator
    }

    pub fn outer(&self) -> &Poly {
        &self.outer
    }

    pub fn dim(&self) -> usize {
        self.numerator.dim()
    }

    pub fn eval(&self, z: C) -> Vec<C> {
        let s = z / (self.b.eval(z) * self.outer.eval(z));
        self.numerator.eval(z).into_iter().map(|c| c * s).collect()
    }

    /// The same element multiplied by a complex constant.
    pub fn scaled(&self, s: C) -> Self {
        let numerator = DiscPoly {
            coeffs: self
                .numerator
                .coeffs
                .iter()
                .map(|c| c.iter().map(|x| x * s).collect())
                .collect(),
        };
        DualElement { numerator, ..self.clone() }
    }
}

/// Exact pairing `(1/2 pi) int f . h dtheta` for any disc with the given
/// jets, evaluated as a sum of residues at the nodes.
pub fn jet_pairing(h: &DualElement, jets: &JetData) -> Result<C> {
    let div = &h.divisor;
    if jets.all().len() != div.nodes().len() {
        return Err(Error::JetMismatch("jet data belongs to another divisor".into()));
    }
    if jets.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: jets.dim() });
    }
    let n = h.dim();
    let mut total = C::new(0.0, 0.0);
    for (alpha, &(za, da)) in div.nodes().iter().enumerate() {
        let list = jets.at(alpha);
        if list.len() != da {
            return Err(Error::JetMismatch(format!("node {alpha} needs {da} derivatives")));
        }
        // residue at za of f q / (B E) = coefficient of (zeta - za)^(da - 1)
        // in f q / (B_a E), with B_a = B / (zeta - za)^da
        let others = div
            .nodes()
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != alpha)
            .fold(Poly::one(), |acc, (_, &(zb, db))| acc.mul(&Poly::linear_root(zb).pow(db)));
        let denom = others.mul(&h.outer).taylor_at(za);
        let recip = series_reciprocal(&denom, da);
        let mut fact = 1.0;
        let mut f_taylor: Vec<Vec<C>> = Vec::with_capacity(da);
        for (k, v) in list.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            f_taylor.push(v.iter().map(|x| x / fact).collect());
        }
        for j in 0..n {
            let q = h.numerator.component(j).taylor_at(za);
            let g = series_mul(&q, &recip, da);
            for k in 0..da {
                total += f_taylor[k][j] * g[da - 1 - k];
            }
        }
    }
    Ok(total)
}

/// Jets of `f` at the nodes of `div`.
pub fn jets_of(f: &DiscPoly, div: &Divisor) -> Result<JetData> {
    let jets = div
        .nodes()
        .iter()
        .map(|&(z, d)| disc_jet(f, z, d - 1))
        .collect();
    JetData::new(div, jets)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualNorm {
    /// `(1/M) sum_i p*(h(zeta_i))`.
    pub value: f64,
    /// `|Q_2M - Q_M|`.
    pub quadrature_error: f64,
    pub grid: usize,
}

/// Dual norm of `h` on the `m`-point grid, with a doubled-grid error estimate.
pub fn dual_norm(body: &ConvexBody, h: &DualElement, m: usize) -> Result<DualNorm> {
    check_nodes(&h.divisor)?;
    let required = 4 * (h.numerator.degree() + h.divisor.degree());
    if m < required {
        return Err(Error::GridTooSmall { required, got: m });
    }
    let q_m = grid_mean(body, h, m)?;
    let q_2m = grid_mean(body, h, 2 * m)?;
    Ok(DualNorm { value: q_m, quadrature_error: (q_2m - q_m).abs(), grid: m })
}

fn grid_mean(body: &ConvexBody, h: &DualElement, m: usize) -> Result<f64> {
    let mut s = 0.0;
    for z in unit_grid(m) {
        s += body.dual_gauge_unchecked(&h.eval(z))?.value;
    }
    Ok(s / m as f64)
}

fn check_nodes(div: &Divisor) -> Result<()> {
    let r = div.max_modulus();
    if r > MAX_NODE_MODULUS {
        return Err(Error::NodeNearBoundary { modulus: r });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DualOptions {
    /// Numerator degree `K`.
    pub degree: usize,
    /// Grid size; defaults to `8 K`.
    pub grid: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub backend: SolverBackend,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { degree: 32, grid: None, tol: 1e-6, max_iter: 400, backend: SolverBackend::Auto }
    }
}

impl DualOptions {
    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or(8 * self.degree.max(1))
    }
}

/// Solution of the discretized dual problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualCertificate {
    /// Normalized so that `Re <h, jets> = 1`.
    pub h: DualElement,
    pub dual_norm: f64,
    pub quadrature_error: f64,
    pub pairing: C,
    /// `1 / dual_norm`, withheld when the solver did not converge.
    pub lower_bound: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub grid: usize,
}

/// Realified numerator coefficients: index of `Re q_{j,k}` (`Im` is `+1`).
fn qidx(j: usize, k: usize, kk: usize) -> usize {
    2 * (j * kk + k)
}

/// Minimize `(1/M) sum p*(h(zeta_i))` subject to `Re <h, jets> = 1`.
pub fn solve_dual(
    body: &ConvexBody,
    div: &Divisor,
    jets: &JetData,
    opts: &DualOptions,
) -> Result<DualCertificate> {
    if jets.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: jets.dim() });
    }
    check_nodes(div)?;
    let n = body.dim();
    let kk = opts.degree + 1;
    let m = opts.grid_size();
    let required = 4 * (opts.degree + div.degree());
    if m < required {
        return Err(Error::GridTooSmall { required, got: m });
    }
    let outer = div.reflected_poly();
    let np = 2 * n * kk;
    // pairing functional on monomial numerators e_j zeta^k
    let mut ell = vec![0.0; np];
    for j in 0..n {
        for k in 0..kk {
            let mut coeffs = vec![vec![C::new(0.0, 0.0); n]; k + 1];
            coeffs[k][j] = C::new(1.0, 0.0);
            let e = DualElement::new(div.clone(), DiscPoly { coeffs }, outer.clone())?;
            let l = jet_pairing(&e, jets)?;
            ell[qidx(j, k, kk)] = l.re;
            ell[qidx(j, k, kk) + 1] = -l.im;
        }
    }
    let ell_norm: f64 = ell.iter().map(|x| x * x).sum::<f64>().sqrt();
    if ell_norm <= 1e-14 {
        return Err(Error::DegenerateData);
    }
    // grid weights H_ik = zeta_i^(k+1) / (B E)(zeta_i)
    let bpoly = div.poly();
    let grid = unit_grid(m);
    let weights: Vec<Vec<C>> = grid
        .iter()
        .map(|&z| {
            let base = z / (bpoly.eval(z) * outer.eval(z));
            let mut out = Vec::with_capacity(kk);
            let mut pw = base;
            for _ in 0..kk {
                out.push(pw);
                pw *= z;
            }
            out
        })
        .collect();
    let model = DualGrid { n, kk, weights };
    let conic_ok = !matches!(body.kind(), BodyKind::Oracle(_));
    let use_conic = match opts.backend {
        SolverBackend::Auto => conic_ok,
        SolverBackend::Conic => {
            if !conic_ok {
                return Err(Error::InvalidArgument("oracle bodies have no conic description".into()));
            }
            true
        }
        SolverBackend::CuttingPlane => false,
    };
    let (x, iterations, engine_ok) = if use_conic {
        solve_dual_conic(body, &model, &ell, opts)?
    } else {
        let oracle = DualCuts { body, model: &model, w: vec![1.0 / m as f64; m] };
        let x0: Vec<f64> = ell.iter().map(|v| v / (ell_norm * ell_norm)).collect();
        let cp = CpOptions { tol: opts.tol, max_iter: opts.max_iter, radius: 1.0, max_cuts: 60 * m };
        let r = cutting_plane::minimize(&oracle, x0, &[(ell.clone(), 1.0)], &cp)?;
        (r.x, r.iterations, r.converged)
    };
    let coeffs: Vec<Vec<C>> = (0..kk)
        .map(|k| (0..n).map(|j| C::new(x[qidx(j, k, kk)], x[qidx(j, k, kk) + 1])).collect())
        .collect();
    let raw = DualElement::new(div.clone(), DiscPoly { coeffs }, outer)?;
    let pr = jet_pairing(&raw, jets)?;
    if pr.re.abs() <= 1e-14 {
        return Err(Error::DegenerateData);
    }
    let h = raw.scaled(C::new(1.0 / pr.re, 0.0));
    let pairing = jet_pairing(&h, jets)?;
    let dn = dual_norm(body, &h, m)?;
    Ok(DualCertificate {
        h,
        dual_norm: dn.value,
        quadrature_error: dn.quadrature_error,
        pairing,
        lower_bound: engine_ok.then(|| 1.0 / dn.value),
        converged: engine_ok,
        iterations,
        grid: m,
    })
}

struct DualGrid {
    n: usize,
    kk: usize,
    weights: Vec<Vec<C>>,
}

impl DualGrid {
    fn re_im(&self, i: usize, j: usize, off: usize) -> (Affine, Affine) {
        let mut re = Affine::default();
        let mut im = Affine::default();
        for (k, h) in self.weights[i].iter().enumerate() {
            let idx = off + qidx(j, k, self.kk);
            re.add_term(idx, h.re);
            re.add_term(idx + 1, -h.im);
            im.add_term(idx, h.im);
            im.add_term(idx + 1, h.re);
        }
        (re, im)
    }

    fn value(&self, i: usize, x: &[f64]) -> Vec<C> {
        (0..self.n)
            .map(|j| {
                self.weights[i]
                    .iter()
                    .enumerate()
                    .map(|(k, h)| {
                        let idx = qidx(j, k, self.kk);
                        h * C::new(x[idx], x[idx + 1])
                    })
                    .sum()
            })
            .collect()
    }
}

fn solve_dual_conic(
    body: &ConvexBody,
    model: &DualGrid,
    ell: &[f64],
    opts: &DualOptions,
) -> Result<(Vec<f64>, usize, bool)> {
    let m = model.weights.len();
    let n = model.n;
    let inv_m = 1.0 / m as f64;
    let mut b = ConicBuilder::new();
    let xs = b.add_vars(ell.len());
    let off = xs.start;
    let mut norm_row = Affine::constant(-1.0);
    for (i, &l) in ell.iter().enumerate() {
        norm_row.add_term(off + i, l);
    }
    b.zero(&[norm_row]);
    match body.kind() {
        BodyKind::Ball => {
            for i in 0..m {
                let s = b.add_var();
                b.set_cost(s, inv_m);
                let mut row = vec![Affine::var(s)];
                for j in 0..n {
                    let (re, im) = model.re_im(i, j, off);
                    row.push(re);
                    row.push(im);
                }
                b.soc(&row);
            }
        }
        BodyKind::Polydisc { radii } => {
            for i in 0..m {
                for (j, r) in radii.iter().enumerate() {
                    let s = b.add_var();
                    b.set_cost(s, inv_m * r);
                    let (re, im) = model.re_im(i, j, off);
                    b.soc(&[Affine::var(s), re, im]);
                }
            }
        }
        BodyKind::ComplexEllipsoid { exponents, radii } => {
            // p*(w) = min_mu mu + sum_j kappa_j sigma_j^q' mu^(1 - q'),
            // epigraph of each term via (v, mu, sigma) in K_pow(1 - 1/(2 m))
            for i in 0..m {
                let mu = b.add_var();
                b.set_cost(mu, inv_m);
                let mut lone = Vec::new();
                for j in 0..n {
                    let sigma = b.add_var();
                    let (re, im) = model.re_im(i, j, off);
                    b.soc(&[Affine::var(sigma), re.scale(radii[j]), im.scale(radii[j])]);
                    let mj = exponents[j];
                    if (mj - 0.5).abs() <= 1e-12 {
                        let mut e = Affine::var(mu);
                        e.add_term(sigma, -1.0);
                        lone.push(e);
                    } else {
                        let q = 2.0 * mj;
                        let qp = q / (q - 1.0);
                        let kappa = (q - 1.0) * q.powf(-qp);
                        let v = b.add_var();
                        b.set_cost(v, inv_m * kappa);
                        b.power(Affine::var(v), Affine::var(mu), Affine::var(sigma), 1.0 / qp);
                    }
                }
                b.nonneg(&lone);
            }
        }
        BodyKind::Polyhedral { functionals } => {
            // h_i = sum_k lambda_ik w_k with lambda >= 0
            for i in 0..m {
                let lam = b.add_vars(functionals.len());
                let mut rows = Vec::with_capacity(2 * n);
                for j in 0..n {
                    let (mut re, mut im) = model.re_im(i, j, off);
                    for (k, w) in functionals.iter().enumerate() {
                        re.add_term(lam.start + k, -w[j].re);
                        im.add_term(lam.start + k, -w[j].im);
                    }
                    rows.push(re);
                    rows.push(im);
                }
                b.zero(&rows);
                let pos: Vec<Affine> = lam.clone().map(Affine::var).collect();
                b.nonneg(&pos);
                for v in lam {
                    b.set_cost(v, inv_m);
                }
            }
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
    Ok((sol.x[xs].to_vec(), sol.iterations, true))
}

struct DualCuts<'a> {
    body: &'a ConvexBody,
    model: &'a DualGrid,
    w: Vec<f64>,
}

impl CutOracle for DualCuts<'_> {
    fn n_params(&self) -> usize {
        2 * self.model.n * self.model.kk
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }

    fn evaluate(&self, x: &[f64], cuts: &mut Vec<Cut>) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.w.len() {
            let hv = self.model.value(i, x);
            let d = self.body.dual_gauge_unchecked(&hv)?;
            total += self.w[i] * d.value;
            // p*(h) >= Re(z . h) for any z in the closed body
            let mut grad = vec![0.0; self.n_params()];
            for j in 0..self.model.n {
                for (k, hk) in self.model.weights[i].iter().enumerate() {
                    let zh = d.point[j] * hk;
                    let idx = qidx(j, k, self.model.kk);
                    grad[idx] = zh.re;
                    grad[idx + 1] = -zh.im;
                }
            }
            cuts.push(Cut { block: i, constant: 0.0, grad });
        }
        Ok(total)
    }
}

/// Tolerances for [`certify`].
#[derive(Debug, Clone, Copy)]
pub struct CertifyTolerances {
    pub gap: f64,
    pub flatness: f64,
    pub alignment: f64,
    /// Evaluation grid; defaults to the certificate's grid.
    pub grid: Option<usize>,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        CertifyTolerances { gap: 1e-4, flatness: 1e-4, alignment: 1e-4, grid: None }
    }
}

/// Residuals of the optimality conditions for a primal/dual pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub primal_value: f64,
    pub dual_norm: f64,
    /// `P(f) P*(h) / Re <h, f> - 1`.
    pub gap: f64,
    /// `max_i |p(f(zeta_i)) - P(f)|`.
    pub flatness: f64,
    /// `max_i |Re(f . h)(zeta_i) - p(f(zeta_i)) p*(h(zeta_i))|` with `Re <h, f> = 1`.
    pub alignment: f64,
    pub quadrature_error: f64,
    pub grid: usize,
    pub pass_gap: bool,
    pub pass_flatness: bool,
    pub pass_alignment: bool,
    pub pass: bool,
}

/// Evaluate the gap, flatness and alignment residuals of `(f, h)`.
pub fn certify(
    body: &ConvexBody,
    f: &DiscPoly,
    h: &DualElement,
    tol: &CertifyTolerances,
    default_grid: usize,
) -> Result<CertificateReport> {
    let m = tol.grid.unwrap_or(default_grid);
    let jets = jets_of(f, h.divisor())?;
    let pr = jet_pairing(h, &jets)?;
    if pr.re <= 0.0 {
        return Err(Error::DegenerateData);
    }
    let hs = h.scaled(C::new(1.0 / pr.re, 0.0));
    let profile = gauge_profile(body, f, m)?;
    let primal = profile.iter().cloned().fold(0.0, f64::max);
    let dn = dual_norm(body, &hs, m)?;
    let mut flatness = 0.0f64;
    let mut alignment = 0.0f64;
    for (i, z) in unit_grid(m).into_iter().enumerate() {
        let fv = f.eval(z);
        let hv = hs.eval(z);
        let ps = body.dual_gauge_unchecked(&hv)?.value;
        flatness = flatness.max((profile[i] - primal).abs());
        alignment = alignment.max((pairing(&fv, &hv).re - profile[i] * ps).abs());
    }
    let gap = primal * dn.value - 1.0;
    let pass_gap = gap.abs() <= tol.gap;
    let pass_flatness = flatness <= tol.flatness;
    let pass_alignment = alignment <= tol.alignment;
    Ok(CertificateReport {
        primal_value: primal,
        dual_norm: dn.value,
        gap,
        flatness,
        alignment,
        quadrature_error: dn.quadrature_error,
        grid: m,
        pass_gap,
        pass_flatness,
        pass_alignment,
        pass: pass_gap && pass_flatness && pass_alignment,
    })
}

/// A disc `f` with its dual companion `f~ = zeta h`, normalized so that
/// `f' . f~ = 1` on the circle.
#[derive(Debug, Clone)]
pub struct StationaryPair {
    pub f: DiscPoly,
    /// Numerator of `f~`.
    pub f_tilde: DiscPoly,
    /// Denominator of `f~` (the outer factor `E`).
    pub f_tilde_den: Poly,
    /// `h` rescaled consistently with `f~`.
    pub h: DualElement,
    /// Mean of `f' . f~` before normalization.
    pub constant: C,
    /// `max |f' . f~ - 1|` on the check grid after normalization.
    pub constancy_residual: f64,
}

impl StationaryPair {
    pub fn f_tilde_at(&self, z: C) -> Vec<C> {
        let d = self.f_tilde_den.eval(z);
        self.f_tilde.eval(z).into_iter().map(|c| c / d).collect()
    }

    /// Derivative of `f~`.
    pub fn f_tilde_derivative_at(&self, z: C) -> Vec<C> {
        let d = self.f_tilde_den.eval(z);
        let dd = self.f_tilde_den.derivative().eval(z);
        let num = self.f_tilde.eval(z);
        let dnum = self.f_tilde.derivative().eval(z);
        num.iter()
            .zip(&dnum)
            .map(|(p, dp)| (dp * d - p * dd) / (d * d))
            .collect()
    }
}

/// Build `f~ = zeta h` and check `f' . f~ = const`.
pub fn build_stationary(f: &DiscPoly, h: &DualElement, tol: f64) -> Result<StationaryPair> {
    if f.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: h.dim() });
    }
    let zeta2 = Poly::one().shift_up(2);
    let b = h.divisor().poly();
    let scale = h.numerator().max_abs_coeff().max(1e-300);
    let mut comps = Vec::with_capacity(f.dim());
    for q in h.numerator().components() {
        let (quot, rem) = q.mul(&zeta2).div_rem(&b);
        let r = rem.max_abs_coeff() / scale;
        if r > 1e-9 {
            return Err(Error::SurvivingPole { remainder: r });
        }
        comps.push(quot);
    }
    let num = DiscPoly::from_components(&comps);
    let den = h.outer().clone();
    let fp = f.derivative();
    let m = (8 * (f.degree() + num.degree() + den.degree())).max(64);
    let vals: Vec<C> = unit_grid(m)
        .into_iter()
        .map(|z| pairing(&fp.eval(z), &num.eval(z)) / den.eval(z))
        .collect();
    let mean: C = vals.iter().sum::<C>() / m as f64;
    if mean.norm() == 0.0 {
        return Err(Error::NonStationary { deviation: f64::INFINITY });
    }
    let dev = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm();
    if dev > tol {
        return Err(Error::NonStationary { deviation: dev });
    }
    let s = C::new(1.0, 0.0) / mean;
    let f_tilde = DiscPoly::from_components(&comps.iter().map(|p| p.scale(s)).collect::<Vec<_>>());
    Ok(StationaryPair {
        f: f.clone(),
        f_tilde,
        f_tilde_den: den,
        h: h.scaled(s),
        constant: mean,
        constancy_residual: dev,
    })
}
