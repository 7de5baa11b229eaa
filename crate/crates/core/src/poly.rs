//! Dense polynomials in one complex variable, ascending coefficients.

use crate::C;
use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<C>,
}

impl Poly {
    pub fn new(coeffs: Vec<C>) -> Self {
        if coeffs.is_empty() {
            Self::zero()
        } else {
            Poly { coeffs }
        }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![C::new(0.0, 0.0)] }
    }

    pub fn one() -> Self {
        Self::constant(C::new(1.0, 0.0))
    }

    pub fn constant(c: C) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `zeta - root`.
    pub fn linear_root(root: C) -> Self {
        Poly { coeffs: vec![-root, C::new(1.0, 0.0)] }
    }

    /// Monic polynomial with the given roots, multiplicities repeated.
    pub fn from_roots(roots: &[C]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| acc.mul(&Self::linear_root(r)))
    }

    /// Nominal degree (length - 1), including trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C::new(0.0, 0.0); len];
        for (k, o) in out.iter_mut().enumerate() {
            if let Some(&a) = self.coeffs.get(k) {
                *o += a;
            }
            if let Some(&b) = other.coeffs.get(k) {
                *o += b;
            }
        }
        Poly { coeffs: out }
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Multiply by `zeta^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        let mut coeffs = vec![C::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division by `divisor`. Returns `(quotient, remainder)`.
    ///
    /// The divisor's leading coefficient must be nonzero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dn = divisor.degree();
        let lead = divisor.coeffs[dn];
        if self.coeffs.len() <= dn {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let qlen = self.coeffs.len() - dn;
        let mut quot = vec![C::new(0.0, 0.0); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dn] / lead;
            quot[k] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
        rem.truncate(dn.max(1));
        if dn == 0 {
            rem = vec![C::new(0.0, 0.0)];
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Taylor coefficients at `center`: `p(center + t) = sum c_k t^k`.
    pub fn taylor_at(&self, center: C) -> Vec<C> {
        // repeated synthetic division
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let upper = work[j + 1];
                work[j] += center * upper;
            }
            out.push(work[k]);
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// Truncated power-series reciprocal of `a` (requires `a[0] != 0`).
pub fn series_reciprocal(a: &[C], order: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); order];
    if order == 0 {
        return out;
    }
    let a0 = a[0];
    out[0] = C::new(1.0, 0.0) / a0;
    for k in 1..order {
        let mut s = C::new(0.0, 0.0);
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            s += a[j] * out[k - j];
        }
        out[k] = -s / a0;
    }
    out
}

/// Truncated product of two power series.
pub fn series_mul(a: &[C], b: &[C], order: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); order];
    for (i, &x) in a.iter().enumerate().take(order) {
        for (j, &y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}
