//! Minkowski gauge `p`, dual gauge `p*` and supporting functionals.
//!
//! Duality is taken with respect to the bilinear pairing
//! `z . w = sum z_j w_j`, so `p*(w) = sup { Re(z . w) : p(z) <= 1 }`.

mod ellipsoid;
mod oracle;
mod polyhedral;

pub use oracle::GaugeOracle;

use crate::error::{Error, Result};
use crate::sampling::sphere_samples;
use crate::{all_finite, norm, pairing, C};
use std::sync::Arc;

/// Shape of a convex body.
#[derive(Debug, Clone)]
pub enum BodyKind {
    /// Euclidean unit ball.
    Ball,
    /// `max_j |z_j| / r_j < 1`.
    Polydisc { radii: Vec<f64> },
    /// `sum_j (|z_j| / r_j)^(2 m_j) < 1`, `m_j >= 1/2`.
    ComplexEllipsoid { exponents: Vec<f64>, radii: Vec<f64> },
    /// `max_i Re(z . w_i) < 1`.
    Polyhedral { functionals: Vec<Vec<C>> },
    /// Gauge known only through an evaluator.
    Oracle(Arc<dyn GaugeOracle>),
}

/// Bounded convex body in `C^n` with 0 in its interior.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
    /// `|z| / c <= p(z) <= c |z|`.
    comparability: f64,
}

/// `w` with `p*(w) = 1` and `Re(z . w) = p(z)` at the point it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunctional {
    pub w: Vec<C>,
    /// The touching point it was built for.
    pub at: Vec<C>,
    /// `|Re(at . w) - p(at)|`.
    pub slack: f64,
}

/// Dual gauge value together with a maximizing point of the closed body.
#[derive(Debug, Clone)]
pub struct DualGaugeValue {
    pub value: f64,
    pub point: Vec<C>,
    /// First-order optimality residual; exact kinds report 0.
    pub residual: f64,
}

const ORACLE_DUAL_TOL: f64 = 1e-6;

impl ConvexBody {
    /// Euclidean unit ball in `C^n`.
    pub fn ball(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ConvexBody { dim: n, kind: BodyKind::Ball, comparability: 1.0 })
    }

    /// The unit disc in `C`.
    pub fn unit_disc() -> Self {
        Self::ball(1).expect("n = 1 is valid")
    }

    pub fn polydisc(radii: Vec<f64>) -> Result<Self> {
        check_dim(radii.len())?;
        check_radii(&radii)?;
        let n = radii.len() as f64;
        let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let rmax = radii.iter().cloned().fold(0.0, f64::max);
        let c = (1.0 / rmin).max(n.sqrt() * rmax);
        Ok(ConvexBody { dim: radii.len(), kind: BodyKind::Polydisc { radii }, comparability: c })
    }

    pub fn complex_ellipsoid(exponents: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        check_dim(radii.len())?;
        check_radii(&radii)?;
        if exponents.len() != radii.len() {
            return Err(Error::DimensionMismatch { expected: radii.len(), got: exponents.len() });
        }
        if exponents.iter().any(|m| !m.is_finite() || *m < 0.5) {
            return Err(Error::InvalidBody("ellipsoid exponents must satisfy m_j >= 1/2".into()));
        }
        let n = radii.len() as f64;
        // inscribed polydisc radii r_j n^(-1/(2 m_j)), circumscribed r_j
        let rho_min = radii
            .iter()
            .zip(&exponents)
            .map(|(r, m)| r * n.powf(-1.0 / (2.0 * m)))
            .fold(f64::INFINITY, f64::min);
        let rmax = radii.iter().cloned().fold(0.0, f64::max);
        let c = (1.0 / rho_min).max(n.sqrt() * rmax);
        Ok(ConvexBody {
            dim: radii.len(),
            kind: BodyKind::ComplexEllipsoid { exponents, radii },
            comparability: c,
        })
    }

    /// Polytope `{Re(z . w_i) <= 1}`; rejects unbounded or degenerate input.
    pub fn polyhedral(functionals: Vec<Vec<C>>) -> Result<Self> {
        let n = functionals.first().map(|w| w.len()).unwrap_or(0);
        check_dim(n)?;
        for w in &functionals {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            if !all_finite(w) {
                return Err(Error::NonFinite);
            }
        }
        if functionals.len() < 2 * n + 1 {
            return Err(Error::InvalidBody(format!(
                "a bounded polytope in C^{n} needs at least {} facets",
                2 * n + 1
            )));
        }
        for u in sphere_samples(n, 2000, 0x5eed) {
            if polyhedral::gauge(&functionals, &u) <= 0.0 {
                return Err(Error::InvalidBody("polytope is unbounded".into()));
            }
        }
        let radius = polyhedral::outer_radius(&functionals, n)?;
        let wmax = functionals.iter().map(|w| norm(w)).fold(0.0, f64::max);
        Ok(ConvexBody {
            dim: n,
            kind: BodyKind::Polyhedral { functionals },
            comparability: wmax.max(radius),
        })
    }

    /// Body given by an external gauge evaluator with comparability constant `c`.
    pub fn oracle(oracle: Arc<dyn GaugeOracle>, comparability: f64) -> Result<Self> {
        let n = oracle.dim();
        check_dim(n)?;
        if !(comparability.is_finite() && comparability >= 1.0) {
            return Err(Error::InvalidBody("comparability constant must be >= 1".into()));
        }
        Ok(ConvexBody { dim: n, kind: BodyKind::Oracle(oracle), comparability })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn comparability(&self) -> f64 {
        self.comparability
    }

    /// Short name of the body kind.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BodyKind::Ball => "ball",
            BodyKind::Polydisc { .. } => "polydisc",
            BodyKind::ComplexEllipsoid { .. } => "complex_ellipsoid",
            BodyKind::Polyhedral { .. } => "polyhedral",
            BodyKind::Oracle(_) => "oracle",
        }
    }

    /// Invariant under `z -> e^{i t} z` coordinatewise.
    pub fn is_circled(&self) -> bool {
        matches!(
            self.kind,
            BodyKind::Ball | BodyKind::Polydisc { .. } | BodyKind::ComplexEllipsoid { .. }
        )
    }

    /// Boundary is `C^1` away from the origin.
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            BodyKind::Ball => true,
            BodyKind::ComplexEllipsoid { exponents, .. } => exponents.iter().all(|&m| m >= 1.0),
            BodyKind::Oracle(_) => true,
            _ => false,
        }
    }

    pub(crate) fn check_vector(&self, z: &[C]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.len() });
        }
        if !all_finite(z) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Minkowski gauge `p(z) = inf { t > 0 : z / t in body }`.
    pub fn gauge_eval(&self, z: &[C]) -> Result<f64> {
        self.check_vector(z)?;
        Ok(self.gauge_unchecked(z))
    }

    pub(crate) fn gauge_unchecked(&self, z: &[C]) -> f64 {
        match &self.kind {
            BodyKind::Ball => norm(z),
            BodyKind::Polydisc { radii } => z
                .iter()
                .zip(radii)
                .map(|(c, r)| c.norm() / r)
                .fold(0.0, f64::max),
            BodyKind::ComplexEllipsoid { exponents, radii } => ellipsoid::gauge(exponents, radii, z),
            BodyKind::Polyhedral { functionals } => polyhedral::gauge(functionals, z),
            BodyKind::Oracle(o) => o.gauge(z),
        }
    }

    /// Dual gauge `p*(w) = sup { Re(z . w) : p(z) <= 1 }`.
    pub fn dual_gauge_eval(&self, w: &[C]) -> Result<f64> {
        Ok(self.dual_gauge_point(w)?.value)
    }

    /// Dual gauge with a maximizing point `z*` of the closed body; `z*`
    /// is a subgradient of `p*` at `w`.
    pub fn dual_gauge_point(&self, w: &[C]) -> Result<DualGaugeValue> {
        self.check_vector(w)?;
        self.dual_gauge_unchecked(w)
    }

    pub(crate) fn dual_gauge_unchecked(&self, w: &[C]) -> Result<DualGaugeValue> {
        let zero = || vec![C::new(0.0, 0.0); w.len()];
        let (value, point, residual) = match &self.kind {
            BodyKind::Ball => {
                let nw = norm(w);
                let z = if nw > 0.0 { w.iter().map(|c| c.conj() / nw).collect() } else { zero() };
                (nw, z, 0.0)
            }
            BodyKind::Polydisc { radii } => {
                let v = w.iter().zip(radii).map(|(c, r)| r * c.norm()).sum();
                let z = w
                    .iter()
                    .zip(radii)
                    .map(|(c, r)| {
                        if c.norm() > 0.0 {
                            c.conj() / c.norm() * *r
                        } else {
                            C::new(0.0, 0.0)
                        }
                    })
                    .collect();
                (v, z, 0.0)
            }
            BodyKind::ComplexEllipsoid { exponents, radii } => {
                let (v, z) = ellipsoid::dual(exponents, radii, w);
                (v, z, 0.0)
            }
            BodyKind::Polyhedral { functionals } => {
                if norm(w) == 0.0 {
                    (0.0, zero(), 0.0)
                } else {
                    let (v, z) = polyhedral::support_value(functionals, w)?;
                    (v, z, 0.0)
                }
            }
            BodyKind::Oracle(o) => {
                let (v, z, r) = oracle::dual(o.as_ref(), w);
                if r > ORACLE_DUAL_TOL {
                    return Err(Error::DualGaugeConvergence { residual: r });
                }
                (v, z, r)
            }
        };
        Ok(DualGaugeValue { value, point, residual })
    }

    /// Supporting functional at a nonzero `z`.
    pub fn supporting_functional(&self, z: &[C]) -> Result<SupportFunctional> {
        self.check_vector(z)?;
        let p = self.gauge_unchecked(z);
        if p == 0.0 {
            return Err(Error::ZeroVector);
        }
        let w = self.support_unchecked(z, p);
        let slack = (pairing(z, &w).re - p).abs();
        Ok(SupportFunctional { w, at: z.to_vec(), slack })
    }

    /// Supporting functional at `z` with `p = p(z) > 0` precomputed.
    pub(crate) fn support_unchecked(&self, z: &[C], p: f64) -> Vec<C> {
        match &self.kind {
            BodyKind::Ball => z.iter().map(|c| c.conj() / p).collect(),
            BodyKind::Polydisc { radii } => {
                let vals: Vec<f64> = z.iter().zip(radii).map(|(c, r)| c.norm() / r).collect();
                let tol = 1e-12 * p;
                let j = vals.iter().position(|&v| v >= p - tol).unwrap_or(0);
                let mut w = vec![C::new(0.0, 0.0); z.len()];
                w[j] = z[j].conj() / (z[j].norm() * radii[j]);
                w
            }
            BodyKind::ComplexEllipsoid { exponents, radii } => {
                ellipsoid::support(exponents, radii, z, p)
            }
            BodyKind::Polyhedral { functionals } => {
                functionals[polyhedral::active_facet(functionals, z)].clone()
            }
            BodyKind::Oracle(o) => oracle::support(o.as_ref(), z, p),
        }
    }

    /// Euclidean distance from `z` (with `p(z) <= 1`) to the boundary.
    ///
    /// Exact for the ball, polydisc and polytopes; for the other smooth kinds
    /// it is the first-order estimate `(1 - p(z)) / |grad p(z)|`.
    pub fn boundary_distance(&self, z: &[C]) -> Result<f64> {
        self.check_vector(z)?;
        let p = self.gauge_unchecked(z);
        if p > 1.0 + 1e-12 {
            return Err(Error::OutsideBody { gauge: p });
        }
        let d = match &self.kind {
            BodyKind::Ball => 1.0 - norm(z),
            BodyKind::Polydisc { radii } => z
                .iter()
                .zip(radii)
                .map(|(c, r)| r - c.norm())
                .fold(f64::INFINITY, f64::min),
            BodyKind::Polyhedral { functionals } => functionals
                .iter()
                .map(|w| (1.0 - pairing(z, w).re) / norm(w))
                .fold(f64::INFINITY, f64::min),
            BodyKind::ComplexEllipsoid { .. } | BodyKind::Oracle(_) => {
                if p == 0.0 {
                    self.inner_radius_estimate()
                } else {
                    (1.0 - p) / norm(&self.support_unchecked(z, p))
                }
            }
        };
        Ok(d.max(0.0))
    }

    fn inner_radius_estimate(&self) -> f64 {
        let mut dirs = sphere_samples(self.dim, 256, 0xd15c);
        for j in 0..self.dim {
            let mut e = vec![C::new(0.0, 0.0); self.dim];
            e[j] = C::new(1.0, 0.0);
            dirs.push(e);
        }
        dirs.iter()
            .map(|u| 1.0 / self.gauge_unchecked(u))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidBody("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidBody("radii must be positive and finite".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn ball_examples() {
        let b = ConvexBody::ball(2).unwrap();
        assert!((b.gauge_eval(&[c(3.0, 0.0), c(0.0, 4.0)]).unwrap() - 5.0).abs() < 1e-15);
        let w = b.supporting_functional(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap().w;
        assert_eq!(w, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((b.dual_gauge_eval(&[c(0.0, 2.0), c(0.0, 0.0)]).unwrap() - 2.0).abs() < 1e-15);
        let d = ConvexBody::unit_disc();
        assert!((d.boundary_distance(&[c(0.25, 0.0)]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn polydisc_examples() {
        let b = ConvexBody::polydisc(vec![1.0, 1.0]).unwrap();
        assert!((b.gauge_eval(&[c(0.3, 0.0), c(0.0, 0.5)]).unwrap() - 0.5).abs() < 1e-15);
        assert!((b.dual_gauge_eval(&[c(0.3, 0.0), c(0.0, 0.5)]).unwrap() - 0.8).abs() < 1e-15);
        assert!((b.boundary_distance(&[c(0.5, 0.0), c(0.0, 0.0)]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(b.boundary_distance(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
    }

    #[test]
    fn ellipsoid_one_dimensional_support() {
        let b = ConvexBody::complex_ellipsoid(vec![2.0], vec![1.0]).unwrap();
        let w = b.supporting_functional(&[c(0.7, 0.0)]).unwrap().w;
        assert!((w[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn polytope_square() {
        // the real-imaginary square |Re z| <= 1, |Im z| <= 1 in C
        let f = vec![
            vec![c(1.0, 0.0)],
            vec![c(-1.0, 0.0)],
            vec![c(0.0, 1.0)],
            vec![c(0.0, -1.0)],
        ];
        let b = ConvexBody::polyhedral(f).unwrap();
        // Re(z * i) = -Im z
        assert!((b.gauge_eval(&[c(0.5, -0.8)]).unwrap() - 0.8).abs() < 1e-15);
        let v = b.dual_gauge_eval(&[c(1.0, 1.0)]).unwrap();
        // max over square of x - y = 2
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn unbounded_polytope_rejected() {
        let f = vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)], vec![c(0.0, -1.0)]];
        assert!(ConvexBody::polyhedral(f).is_err());
    }

    #[test]
    fn errors() {
        let b = ConvexBody::ball(2).unwrap();
        assert!(matches!(b.gauge_eval(&[c(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            b.supporting_functional(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            b.gauge_eval(&[c(f64::NAN, 0.0), c(0.0, 0.0)]),
            Err(Error::NonFinite)
        ));
        assert!(ConvexBody::complex_ellipsoid(vec![0.4], vec![1.0]).is_err());
    }

    #[derive(Debug)]
    struct Euclid(usize);
    impl GaugeOracle for Euclid {
        fn dim(&self) -> usize {
            self.0
        }
        fn gauge(&self, z: &[C]) -> f64 {
            norm(z)
        }
    }

    #[test]
    fn oracle_matches_ball() {
        let o = ConvexBody::oracle(Arc::new(Euclid(2)), 1.0).unwrap();
        let z = [c(0.3, -0.2), c(0.1, 0.4)];
        let w = o.supporting_functional(&z).unwrap().w;
        let exact: Vec<C> = z.iter().map(|x| x.conj() / norm(&z)).collect();
        for (a, b) in w.iter().zip(&exact) {
            assert!((a - b).norm() < 1e-8);
        }
        let wd = [c(0.5, 0.5), c(-1.0, 0.2)];
        let v = o.dual_gauge_eval(&wd).unwrap();
        assert!((v - norm(&wd)).abs() < 1e-9);
    }
}
