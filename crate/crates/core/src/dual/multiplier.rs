//! Positive multipliers that move a dual element between divisors.

use super::DualElement;
use crate::disc::{DiscPoly, Divisor};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::{unit_grid, C};

/// One factor of a multiplier, written through `sigma_e(z) = (z - e) / (1 - conj(e) z)`.
#[derive(Debug, Clone, PartialEq)]
enum Factor {
    /// `3 + sigma_e + 1 / sigma_e`: a new pole at `e`, values in `[1, 5]`.
    Pole { e: C },
    /// `(sigma_e - c)(1 - conj(c) sigma_e) / sigma_e`, `c = sigma_e(z)`:
    /// a pole at `e` and a zero at `z`, values `|sigma_e - c|^2`.
    Pair { e: C, z: C },
}

/// Product of factors, positive on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    factors: Vec<Factor>,
    min_on_circle: f64,
}

fn a_poly(e: C) -> Poly {
    Poly::linear_root(e)
}

fn d_poly(e: C) -> Poly {
    Poly::new(vec![C::new(1.0, 0.0), -e.conj()])
}

fn sigma(e: C, z: C) -> C {
    (z - e) / (C::new(1.0, 0.0) - e.conj() * z)
}

impl Factor {
    fn eval(&self, zeta: C) -> C {
        match *self {
            Factor::Pole { e } => {
                let s = sigma(e, zeta);
                C::new(3.0, 0.0) + s + C::new(1.0, 0.0) / s
            }
            Factor::Pair { e, z } => {
                let s = sigma(e, zeta);
                let c = sigma(e, z);
                (s - c) * (C::new(1.0, 0.0) - c.conj() * s) / s
            }
        }
    }
}

impl Multiplier {
    pub fn eval(&self, zeta: C) -> C {
        self.factors.iter().map(|f| f.eval(zeta)).product()
    }

    /// Minimum of `phi` over the check grid of the circle.
    pub fn min_on_circle(&self) -> f64 {
        self.min_on_circle
    }

    /// `phi h` as an element for the new divisor.
    pub fn apply(&self, h: &DualElement, new_divisor: &Divisor) -> Result<DualElement> {
        // h = zeta q / (B E); each factor contributes N / (A D) with
        // A = zeta - e, D = 1 - conj(e) zeta. Poles join B, the zero of a
        // pair cancels against B, and every D joins the outer factor.
        let mut extra_num = Poly::one();
        let mut extra_outer = Poly::one();
        for f in &self.factors {
            match *f {
                Factor::Pole { e } => {
                    let a = a_poly(e);
                    let d = d_poly(e);
                    let n = a.mul(&d).scale(C::new(3.0, 0.0)).add(&a.mul(&a)).add(&d.mul(&d));
                    extra_num = extra_num.mul(&n);
                    extra_outer = extra_outer.mul(&d);
                }
                Factor::Pair { e, z } => {
                    let c = sigma(e, z);
                    let a = a_poly(e);
                    let d = d_poly(e);
                    // (A - c D) = (1 + c conj(e)) (zeta - z); keep (1 + c conj(e)) (D - conj(c) A)
                    let keep = d.add(&a.scale(-c.conj())).scale(C::new(1.0, 0.0) + c * e.conj());
                    extra_num = extra_num.mul(&keep);
                    extra_outer = extra_outer.mul(&d);
                }
            }
        }
        let numerator = h.numerator().scalar_mul(&extra_num);
        let outer = h.outer().mul(&extra_outer);
        DualElement::new(new_divisor.clone(), DiscPoly::from_components(&numerator.components()), outer)
    }
}

/// Multiplier `phi > 0` on the circle with `phi Y(div) ⊂ Y(new)`.
///
/// Requires `deg new >= deg div`. Each point whose multiplicity drops is
/// paired with a point whose multiplicity grows; remaining growth is covered
/// by pure pole factors.
pub fn divisor_multiplier(div: &Divisor, new: &Divisor, grid: usize) -> Result<Multiplier> {
    if new.degree() < div.degree() {
        return Err(Error::InvalidDivisor(format!(
            "new divisor has degree {} < {}",
            new.degree(),
            div.degree()
        )));
    }
    let mut poles = Vec::new();
    for &(z, d) in new.nodes() {
        let old = div.multiplicity_at(z);
        for _ in old..d {
            poles.push(z);
        }
    }
    let mut zeros = Vec::new();
    for &(z, d) in div.nodes() {
        let now = new.multiplicity_at(z);
        for _ in now..d {
            zeros.push(z);
        }
    }
    let mut factors = Vec::with_capacity(poles.len());
    for (i, &e) in poles.iter().enumerate() {
        match zeros.get(i) {
            Some(&z) => factors.push(Factor::Pair { e, z }),
            None => factors.push(Factor::Pole { e }),
        }
    }
    let mut phi = Multiplier { factors, min_on_circle: f64::INFINITY };
    let mut min = f64::INFINITY;
    for z in unit_grid(grid.max(16)) {
        let v = phi.eval(z);
        if v.im.abs() > 1e-9 * v.norm().max(1.0) {
            return Err(Error::PositivityViolation { min: f64::NAN });
        }
        min = min.min(v.re);
    }
    if min <= 0.0 {
        return Err(Error::PositivityViolation { min });
    }
    phi.min_on_circle = min;
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn pure_pole_at_origin() {
        let div = Divisor::at_origin(1).unwrap();
        let new = Divisor::at_origin(2).unwrap();
        let phi = divisor_multiplier(&div, &new, 4096).unwrap();
        assert!((phi.min_on_circle() - 1.0).abs() < 1e-12);
        let z = c(0.0, 1.0);
        assert!((phi.eval(z) - (c(3.0, 0.0) + z + 1.0 / z)).norm() < 1e-14);
    }

    #[test]
    fn pole_with_zero() {
        let div = Divisor::new(vec![(c(0.5, 0.0), 1)]).unwrap();
        let new = Divisor::at_origin(1).unwrap();
        let phi = divisor_multiplier(&div, &new, 4096).unwrap();
        assert!((phi.min_on_circle() - 0.25).abs() < 1e-12);
        let z = c(0.6, 0.8);
        let expect = (z - 0.5) * (c(1.0, 0.0) - z / 2.0) / z;
        assert!((phi.eval(z) - expect).norm() < 1e-14);
    }

    #[test]
    fn applied_element_matches_pointwise_product() {
        let div = Divisor::new(vec![(c(0.0, 0.0), 2), (c(0.4, 0.1), 1)]).unwrap();
        let new = Divisor::new(vec![(c(0.0, 0.0), 1), (c(0.4, 0.1), 2), (c(-0.3, 0.2), 1)]).unwrap();
        let phi = divisor_multiplier(&div, &new, 1024).unwrap();
        let q = DiscPoly::new(vec![vec![c(1.0, 0.2)], vec![c(-0.4, 0.3)]]).unwrap();
        let h = DualElement::new(div.clone(), q, div.reflected_poly()).unwrap();
        let g = phi.apply(&h, &new).unwrap();
        for z in unit_grid(17) {
            let lhs = g.eval(z)[0];
            let rhs = phi.eval(z) * h.eval(z)[0];
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }
}
