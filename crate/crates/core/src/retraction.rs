//! Holomorphic retraction onto a stationary disc.
//!
//! For a stationary pair `(f, f~)` the function
//! `det S(zeta, z) = (f(zeta) - z) . f~(zeta)` has exactly one zero
//! `zeta_1(z)` in the disc for every `z` in the domain. Then
//! `c(z) = zeta_1(z)` is a left inverse of `f` and `f o c` is a retraction
//! onto `f(D)`. With a Bézout pair `g f~_1 + h f~_2 = 1` the flattening map
//! `Phi` extends `f` to a biholomorphism whose first coordinate is `c`.

use crate::dual::StationaryPair;
use crate::error::{Error, Result};
use crate::gauge::ConvexBody;
use crate::linalg::least_squares;
use crate::poly::Poly;
use crate::{norm, pairing, sampling, unit_grid, C};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const BEZOUT_TOL: f64 = 1e-8;

/// `g f~_{j1} + h f~_{j2} = 1` on the closed disc.
#[derive(Debug, Clone)]
pub struct BezoutPair {
    pub j1: usize,
    pub j2: usize,
    pub g: Poly,
    pub h: Poly,
    /// `max |g P_1 + h P_2 - E| / max |E|` on the circle, with `f~ = P / E`.
    pub residual: f64,
}

/// Result of locating `zeta_1(z)`.
#[derive(Debug, Clone, Copy)]
pub struct RootLocation {
    pub zeta: C,
    pub winding: i64,
    /// `det S` nearly vanishes on the contour.
    pub reduced_precision: bool,
}

/// The flattening map attached to a stationary pair.
#[derive(Debug, Clone)]
pub struct FlatteningMap {
    pair: StationaryPair,
    bezout: Option<BezoutPair>,
    /// Unitary change of coordinates `z' = U z` applied before pairing
    /// coordinates; `None` means the identity.
    rotation: Option<Vec<Vec<C>>>,
    /// Coordinate order `[j1, j2, others...]` in rotated coordinates.
    order: Vec<usize>,
}

fn solve_bezout(p1: &Poly, p2: &Poly, e: &Poly, j1: usize, j2: usize) -> BezoutPair {
    let d = p1.degree().max(p2.degree()).max(e.degree()).max(1);
    let g_len = d + 1;
    let rows = 8 * d + 16;
    let grid = unit_grid(rows);
    let mut a = DMatrix::<C>::zeros(rows, 2 * g_len);
    let mut b = DVector::<C>::zeros(rows);
    for (r, &z) in grid.iter().enumerate() {
        let v1 = p1.eval(z);
        let v2 = p2.eval(z);
        let mut pw = C::new(1.0, 0.0);
        for k in 0..g_len {
            a[(r, k)] = v1 * pw;
            a[(r, g_len + k)] = v2 * pw;
            pw *= z;
        }
        b[r] = e.eval(z);
    }
    let x = least_squares(a, &b, 1e-13);
    let g = Poly::new(x.iter().take(g_len).copied().collect());
    let h = Poly::new(x.iter().skip(g_len).copied().collect());
    let check = unit_grid(4 * rows);
    let emax = check.iter().map(|&z| e.eval(z).norm()).fold(0.0, f64::max);
    let residual = check
        .iter()
        .map(|&z| (g.eval(z) * p1.eval(z) + h.eval(z) * p2.eval(z) - e.eval(z)).norm())
        .fold(0.0, f64::max)
        / emax;
    BezoutPair { j1, j2, g, h, residual }
}

/// Bézout pair `g P_{j1} + h P_{j2} = E` for `f~ = P / E`, trying
/// coordinate pairs from the best separated to the worst.
pub fn bezout_pair(numerators: &[Poly], den: &Poly) -> Result<BezoutPair> {
    let n = numerators.len();
    if n < 2 {
        return Err(Error::InvalidArgument("a Bézout pair needs two coordinates".into()));
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for j1 in 0..n {
        for j2 in j1 + 1..n {
            pairs.push((pair_score(&numerators[j1], &numerators[j2]), j1, j2));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = f64::INFINITY;
    for &(_, j1, j2) in &pairs {
        let bp = solve_bezout(&numerators[j1], &numerators[j2], den, j1, j2);
        if bp.residual <= BEZOUT_TOL {
            return Ok(bp);
        }
        best = best.min(bp.residual);
    }
    Err(Error::BezoutFailure { residual: best })
}

fn rotate(u: &[Vec<C>], z: &[C]) -> Vec<C> {
    u.iter().map(|row| pairing(row, z)).collect()
}

fn rotate_conj(u: &[Vec<C>], z: &[C]) -> Vec<C> {
    u.iter()
        .map(|row| row.iter().zip(z).map(|(a, b)| a.conj() * b).sum())
        .collect()
}

/// `z = U^H z'`.
fn unrotate(u: &[Vec<C>], zp: &[C]) -> Vec<C> {
    let n = zp.len();
    (0..n)
        .map(|j| (0..n).map(|i| u[i][j].conj() * zp[i]).sum())
        .collect()
}

/// Normalized DFT matrix, a fixed unitary that mixes all coordinates.
fn dft(n: usize) -> Vec<Vec<C>> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| C::from_polar(s, std::f64::consts::TAU * (i * j) as f64 / n as f64))
                .collect()
        })
        .collect()
}

impl FlatteningMap {
    pub fn new(pair: StationaryPair) -> Result<Self> {
        let n = pair.f.dim();
        if n == 1 {
            return Ok(FlatteningMap { pair, bezout: None, rotation: None, order: vec![0] });
        }
        let mut best = f64::INFINITY;
        for rotation in [None, Some(dft(n))] {
            let comps: Vec<Poly> = match &rotation {
                None => pair.f_tilde.components(),
                Some(u) => rotated_components(&pair.f_tilde.components(), u),
            };
            match bezout_pair(&comps, &pair.f_tilde_den) {
                Ok(bp) => {
                    let mut order = vec![bp.j1, bp.j2];
                    order.extend((0..n).filter(|&j| j != bp.j1 && j != bp.j2));
                    return Ok(FlatteningMap { pair, bezout: Some(bp), rotation, order });
                }
                Err(Error::BezoutFailure { residual }) => best = best.min(residual),
                Err(e) => return Err(e),
            }
        }
        Err(Error::BezoutFailure { residual: best })
    }

    pub fn pair(&self) -> &StationaryPair {
        &self.pair
    }

    pub fn bezout(&self) -> Option<&BezoutPair> {
        self.bezout.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.pair.f.dim()
    }

    fn to_rotated(&self, z: &[C]) -> Vec<C> {
        match &self.rotation {
            None => z.to_vec(),
            Some(u) => rotate(u, z),
        }
    }

    fn unrotated(&self, z: &[C]) -> Vec<C> {
        match &self.rotation {
            None => z.to_vec(),
            Some(u) => unrotate(u, z),
        }
    }

    fn ft_rotated(&self, z: C) -> Vec<C> {
        let v = self.pair.f_tilde_at(z);
        match &self.rotation {
            None => v,
            Some(u) => rotate_conj(u, &v),
        }
    }

    /// `Phi(zeta_1, ..., zeta_n)`; arguments in the order
    /// `(zeta_1, zeta_2, zeta_3, ...)` of the flattened coordinates.
    pub fn phi(&self, zeta: &[C]) -> Result<Vec<C>> {
        let n = self.dim();
        if zeta.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: zeta.len() });
        }
        let z1 = zeta[0];
        let fr = self.to_rotated(&self.pair.f.eval(z1));
        let Some(bp) = &self.bezout else {
            return Ok(self.pair.f.eval(z1));
        };
        let ft = self.ft_rotated(z1);
        let (j1, j2) = (self.order[0], self.order[1]);
        let mut out = fr.clone();
        let mut s3 = C::new(0.0, 0.0);
        for (pos, &a) in self.order.iter().enumerate().skip(2) {
            out[a] = fr[a] + zeta[pos];
            s3 += zeta[pos] * ft[a];
        }
        out[j1] = fr[j1] - zeta[1] * ft[j2] - bp.g.eval(z1) * s3;
        out[j2] = fr[j2] + zeta[1] * ft[j1] - bp.h.eval(z1) * s3;
        Ok(self.unrotated(&out))
    }

    /// `det S(zeta, z) = (f(zeta) - z) . f~(zeta)`.
    pub fn det_s(&self, zeta: C, z: &[C]) -> C {
        let fv = self.pair.f.eval(zeta);
        let ft = self.pair.f_tilde_at(zeta);
        fv.iter().zip(z).zip(&ft).map(|((a, b), c)| (a - b) * c).sum()
    }

    /// `(f - z) . P` as a polynomial, where `f~ = P / E`.
    fn det_poly(&self, z: &[C]) -> Poly {
        let mut acc = Poly::zero();
        for (j, p) in self.pair.f_tilde.components().iter().enumerate() {
            let fj = self.pair.f.component(j).add(&Poly::constant(-z[j]));
            acc = acc.add(&fj.mul(p));
        }
        acc
    }

    /// `min_k Re(det S(zeta_k, z) / zeta_k)` over `m` points of the circle;
    /// positive for interior `z` of strictly convex bodies.
    pub fn boundary_sign_min(&self, z: &[C], m: usize) -> f64 {
        unit_grid(m)
            .into_iter()
            .map(|s| (self.det_s(s, z) / s).re)
            .fold(f64::INFINITY, f64::min)
    }

    /// The unique zero of `det S(., z)` in the disc.
    pub fn locate_disc_param(&self, z: &[C]) -> Result<RootLocation> {
        let n = self.dim();
        if z.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: z.len() });
        }
        if !crate::all_finite(z) {
            return Err(Error::NonFinite);
        }
        let g = self.det_poly(z);
        let dg = g.derivative();
        let mut m = (16 * g.degree()).max(512);
        let (winding, moment, min_ratio) = loop {
            let pts = unit_grid(m);
            let vals: Vec<C> = pts.iter().map(|&s| g.eval(s)).collect();
            let mut total = 0.0;
            let mut max_step = 0.0f64;
            for k in 0..m {
                let step = (vals[(k + 1) % m] / vals[k]).arg();
                max_step = max_step.max(step.abs());
                total += step;
            }
            if max_step < 0.5 || m >= 1 << 18 {
                let vmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let vmin = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
                let moment: C = pts
                    .iter()
                    .zip(&vals)
                    .map(|(&s, v)| s * s * dg.eval(s) / v)
                    .sum::<C>()
                    / m as f64;
                break ((total / std::f64::consts::TAU).round() as i64, moment, vmin / vmax);
            }
            m *= 2;
        };
        if winding != 1 {
            return Err(Error::WindingNumber { winding });
        }
        let mut zeta = moment;
        for _ in 0..60 {
            let step = g.eval(zeta) / dg.eval(zeta);
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            zeta -= step;
            if step.norm() <= 1e-16 * zeta.norm().max(1.0) {
                break;
            }
        }
        if zeta.norm() >= 1.0 || !(zeta.re.is_finite() && zeta.im.is_finite()) {
            zeta = moment;
        }
        Ok(RootLocation { zeta, winding, reduced_precision: min_ratio < 1e-8 })
    }

    /// Carathéodory candidate `c(z) = zeta_1(z)`.
    pub fn caratheodory_candidate(&self, z: &[C]) -> Result<C> {
        Ok(self.locate_disc_param(z)?.zeta)
    }

    /// `dc(z) v = f~(zeta) . v / (f'(zeta) . f~(zeta) + (f(zeta) - z) . f~'(zeta))`.
    pub fn candidate_derivative(&self, z: &[C], v: &[C]) -> Result<C> {
        let zeta = self.locate_disc_param(z)?.zeta;
        let ft = self.pair.f_tilde_at(zeta);
        let dft = self.pair.f_tilde_derivative_at(zeta);
        let fp = self.pair.f.derivative().eval(zeta);
        let fv = self.pair.f.eval(zeta);
        let diff: Vec<C> = fv.iter().zip(z).map(|(a, b)| a - b).collect();
        let denom = pairing(&fp, &ft) + pairing(&diff, &dft);
        Ok(pairing(&ft, v) / denom)
    }

    /// Retraction `f(zeta_1(z))` onto `f(D)`.
    pub fn retract(&self, z: &[C]) -> Result<Vec<C>> {
        let zeta = self.locate_disc_param(z)?.zeta;
        Ok(self.pair.f.eval(zeta))
    }

    /// `Phi^{-1}(z)`, checked by a round trip.
    pub fn full_inverse(&self, z: &[C]) -> Result<Vec<C>> {
        let n = self.dim();
        let z1 = self.locate_disc_param(z)?.zeta;
        let mut zeta = vec![C::new(0.0, 0.0); n];
        zeta[0] = z1;
        if let Some(bp) = &self.bezout {
            let zr = self.to_rotated(z);
            let fr = self.to_rotated(&self.pair.f.eval(z1));
            let ft = self.ft_rotated(z1);
            let (j1, j2) = (self.order[0], self.order[1]);
            let mut s3 = C::new(0.0, 0.0);
            for (pos, &a) in self.order.iter().enumerate().skip(2) {
                zeta[pos] = zr[a] - fr[a];
                s3 += zeta[pos] * ft[a];
            }
            zeta[1] = if ft[j2].norm() >= ft[j1].norm() {
                (fr[j1] - bp.g.eval(z1) * s3 - zr[j1]) / ft[j2]
            } else {
                (zr[j2] - fr[j2] + bp.h.eval(z1) * s3) / ft[j1]
            };
        }
        let back = self.phi(&zeta)?;
        let diff: Vec<C> = back.iter().zip(z).map(|(a, b)| a - b).collect();
        let residual = norm(&diff) / norm(z).max(1.0);
        if residual > 1e-9 {
            return Err(Error::RoundTrip { residual });
        }
        Ok(zeta)
    }
}

/// Sampled self-consistency of a retraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetractionCheck {
    pub samples: usize,
    /// `max |G(G(z)) - G(z)|` over interior samples.
    pub idempotence: f64,
    /// `max |G(f(zeta)) - f(zeta)|` over disc samples.
    pub disc_identity: f64,
    /// `max |c(f(zeta)) - zeta|` over disc samples.
    pub left_inverse: f64,
    /// Interior samples where the root could not be located.
    pub winding_failures: usize,
    /// Smallest boundary sign value over the interior samples.
    pub sign_min: f64,
    /// Largest `|c(z)|` over the interior samples.
    pub candidate_sup: f64,
}

impl RetractionCheck {
    pub fn pass(&self, tol: f64) -> bool {
        self.winding_failures == 0
            && self.idempotence <= tol
            && self.disc_identity <= tol
            && self.sign_min > 0.0
            && self.candidate_sup < 1.0
    }
}

/// Checks `map` on `samples` interior points of `body` (gauge at most
/// 0.95) and as many disc points with modulus at most 0.9.
pub fn check_retraction(body: &ConvexBody, map: &FlatteningMap, samples: usize, seed: u64) -> RetractionCheck {
    let grid = 512;
    let mut out = RetractionCheck {
        samples,
        idempotence: 0.0,
        disc_identity: 0.0,
        left_inverse: 0.0,
        winding_failures: 0,
        sign_min: f64::INFINITY,
        candidate_sup: 0.0,
    };
    for z in sampling::interior_points(body, samples, 0.95, seed) {
        out.sign_min = out.sign_min.min(map.boundary_sign_min(&z, grid));
        let Ok(loc) = map.locate_disc_param(&z) else {
            out.winding_failures += 1;
            continue;
        };
        out.candidate_sup = out.candidate_sup.max(loc.zeta.norm());
        let g = map.pair().f.eval(loc.zeta);
        match map.retract(&g) {
            Ok(gg) => out.idempotence = out.idempotence.max(dist(&gg, &g)),
            Err(_) => out.winding_failures += 1,
        }
    }
    let mut rng = sampling::rng(seed ^ 0x5eed);
    for _ in 0..samples {
        let zeta = sampling::in_disc(&mut rng, 0.9);
        let fz = map.pair().f.eval(zeta);
        match map.locate_disc_param(&fz) {
            Ok(loc) => {
                out.left_inverse = out.left_inverse.max((loc.zeta - zeta).norm());
                out.disc_identity = out.disc_identity.max(dist(&map.pair().f.eval(loc.zeta), &fz));
            }
            Err(_) => out.winding_failures += 1,
        }
    }
    out
}

fn dist(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn rotated_components(comps: &[Poly], u: &[Vec<C>]) -> Vec<Poly> {
    let n = comps.len();
    (0..n)
        .map(|i| {
            (0..n).fold(Poly::zero(), |acc, j| acc.add(&comps[j].scale(u[i][j].conj())))
        })
        .collect()
}

/// `min (|p1|^2 + |p2|^2)` over a polar sample of the closed disc.
fn pair_score(p1: &Poly, p2: &Poly) -> f64 {
    let mut best = f64::INFINITY;
    for r in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0] {
        for z in unit_grid(64) {
            let s = z * r;
            best = best.min(p1.eval(s).norm_sqr() + p2.eval(s).norm_sqr());
        }
    }
    best
}
