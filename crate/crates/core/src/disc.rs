//! Divisors, jet data and the affine space of polynomial discs.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::{all_finite, C};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const NODE_SEPARATION: f64 = 1e-12;

/// Finite set of distinct interior points with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DivisorRaw")]
pub struct Divisor {
    nodes: Vec<(C, usize)>,
}

impl Divisor {
    pub fn new(nodes: Vec<(C, usize)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidDivisor("divisor has no nodes".into()));
        }
        for (i, &(z, d)) in nodes.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if z.norm() >= 1.0 {
                return Err(Error::InvalidDivisor(format!("node {z} is not in the open disc")));
            }
            if d == 0 {
                return Err(Error::InvalidDivisor("multiplicities must be >= 1".into()));
            }
            for &(w, _) in &nodes[..i] {
                if (z - w).norm() <= NODE_SEPARATION {
                    return Err(Error::InvalidDivisor(format!("nodes {w} and {z} coincide")));
                }
            }
        }
        Ok(Divisor { nodes })
    }

    /// `d [0]`: a single node at the origin of multiplicity `d`.
    pub fn at_origin(d: usize) -> Result<Self> {
        Self::new(vec![(C::new(0.0, 0.0), d)])
    }

    pub fn nodes(&self) -> &[(C, usize)] {
        &self.nodes
    }

    /// Total multiplicity `d = sum d_a`.
    pub fn degree(&self) -> usize {
        self.nodes.iter().map(|n| n.1).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.nodes.iter().map(|n| n.0.norm()).fold(0.0, f64::max)
    }

    pub fn multiplicity_at(&self, z: C) -> usize {
        self.nodes
            .iter()
            .find(|n| (n.0 - z).norm() <= NODE_SEPARATION)
            .map_or(0, |n| n.1)
    }

    /// `B(zeta) = prod (zeta - zeta_a)^(d_a)`.
    pub fn poly(&self) -> Poly {
        self.nodes
            .iter()
            .fold(Poly::one(), |acc, &(z, d)| acc.mul(&Poly::linear_root(z).pow(d)))
    }

    /// `prod (1 - conj(zeta_a) zeta)^(d_a)`: the reflection of `B`, zero-free
    /// on the closed disc.
    pub fn reflected_poly(&self) -> Poly {
        self.nodes.iter().fold(Poly::one(), |acc, &(z, d)| {
            acc.mul(&Poly::new(vec![C::new(1.0, 0.0), -z.conj()]).pow(d))
        })
    }
}

/// Prescribed derivatives `f^(b)(zeta_a) = a_{a,b}`, `b < d_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetData {
    /// `jets[a][b]` is the `b`-th derivative at node `a`, a vector in `C^n`.
    jets: Vec<Vec<Vec<C>>>,
    dim: usize,
}

impl JetData {
    pub fn new(div: &Divisor, jets: Vec<Vec<Vec<C>>>) -> Result<Self> {
        if jets.len() != div.nodes().len() {
            return Err(Error::JetMismatch(format!(
                "{} nodes but {} jet lists",
                div.nodes().len(),
                jets.len()
            )));
        }
        let dim = jets
            .first()
            .and_then(|j| j.first())
            .map(|v| v.len())
            .unwrap_or(0);
        if dim == 0 {
            return Err(Error::JetMismatch("empty jet vectors".into()));
        }
        for (a, (node, list)) in div.nodes().iter().zip(&jets).enumerate() {
            if list.len() != node.1 {
                return Err(Error::JetMismatch(format!(
                    "node {a} has multiplicity {} but {} derivatives",
                    node.1,
                    list.len()
                )));
            }
            for v in list {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
                }
                if !all_finite(v) {
                    return Err(Error::NonFinite);
                }
            }
        }
        Ok(JetData { jets, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, node: usize) -> &[Vec<C>] {
        &self.jets[node]
    }

    pub fn all(&self) -> &[Vec<Vec<C>>] {
        &self.jets
    }

    /// Metric data on `2 [0]`: `f(0) = a`, `f'(0) = v`.
    pub fn metric(a: &[C], v: &[C]) -> Result<(Divisor, JetData)> {
        let div = Divisor::at_origin(2)?;
        let jets = JetData::new(&div, vec![vec![a.to_vec(), v.to_vec()]])?;
        Ok((div, jets))
    }

    /// Distance data on `[0] + [t]`: `f(0) = a`, `f(t) = b`.
    pub fn distance(a: &[C], b: &[C], t: f64) -> Result<(Divisor, JetData)> {
        let div = Divisor::new(vec![(C::new(0.0, 0.0), 1), (C::new(t, 0.0), 1)])?;
        let jets = JetData::new(&div, vec![vec![a.to_vec()], vec![b.to_vec()]])?;
        Ok((div, jets))
    }
}

#[derive(Deserialize)]
struct DivisorRaw {
    nodes: Vec<(C, usize)>,
}

impl TryFrom<DivisorRaw> for Divisor {
    type Error = Error;

    fn try_from(raw: DivisorRaw) -> Result<Self> {
        Divisor::new(raw.nodes)
    }
}

#[derive(Deserialize)]
struct DiscPolyRaw {
    coeffs: Vec<Vec<C>>,
}

impl TryFrom<DiscPolyRaw> for DiscPoly {
    type Error = Error;

    fn try_from(raw: DiscPolyRaw) -> Result<Self> {
        DiscPoly::new(raw.coeffs)
    }
}

/// Vector polynomial `f(zeta) = sum_k c_k zeta^k`, `c_k in C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscPolyRaw")]
pub struct DiscPoly {
    /// `coeffs[k][j]`: coefficient of `zeta^k` in coordinate `j`.
    pub coeffs: Vec<Vec<C>>,
}

impl DiscPoly {
    pub fn new(coeffs: Vec<Vec<C>>) -> Result<Self> {
        let n = coeffs.first().map(|c| c.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidArgument("disc needs at least one coefficient".into()));
        }
        for c in &coeffs {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            if !all_finite(c) {
                return Err(Error::NonFinite);
            }
        }
        Ok(DiscPoly { coeffs })
    }

    pub fn constant(a: &[C]) -> Self {
        DiscPoly { coeffs: vec![a.to_vec()] }
    }

    pub fn from_components(comps: &[Poly]) -> Self {
        let len = comps.iter().map(|p| p.coeffs.len()).max().unwrap_or(1);
        let coeffs = (0..len)
            .map(|k| {
                comps
                    .iter()
                    .map(|p| p.coeffs.get(k).copied().unwrap_or_default())
                    .collect()
            })
            .collect();
        DiscPoly { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    /// Nominal degree `N` (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn component(&self, j: usize) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c[j]).collect())
    }

    pub fn components(&self) -> Vec<Poly> {
        (0..self.dim()).map(|j| self.component(j)).collect()
    }

    pub fn eval(&self, z: C) -> Vec<C> {
        let n = self.dim();
        let mut out = vec![C::new(0.0, 0.0); n];
        for c in self.coeffs.iter().rev() {
            for j in 0..n {
                out[j] = out[j] * z + c[j];
            }
        }
        out
    }

    pub fn derivative(&self) -> DiscPoly {
        DiscPoly::from_components(
            &self.components().iter().map(|p| p.derivative()).collect::<Vec<_>>(),
        )
    }

    /// Multiply every coordinate by the scalar polynomial `s`.
    pub fn scalar_mul(&self, s: &Poly) -> DiscPoly {
        DiscPoly::from_components(&self.components().iter().map(|p| p.mul(s)).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &DiscPoly) -> DiscPoly {
        let comps: Vec<Poly> = self
            .components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.add(&b))
            .collect();
        DiscPoly::from_components(&comps)
    }

    /// Pad with zero coefficients to nominal degree `n`.
    pub fn padded(&self, degree: usize) -> DiscPoly {
        let mut c = self.coeffs.clone();
        while c.len() < degree + 1 {
            c.push(vec![C::new(0.0, 0.0); self.dim()]);
        }
        DiscPoly { coeffs: c }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }
}

/// Derivatives `f^(b)(zeta)` for `b = 0..=order`.
pub fn disc_jet(f: &DiscPoly, zeta: C, order: usize) -> Vec<Vec<C>> {
    let n = f.dim();
    let mut out = vec![vec![C::new(0.0, 0.0); n]; order + 1];
    for j in 0..n {
        let t = f.component(j).taylor_at(zeta);
        let mut fact = 1.0;
        for (b, row) in out.iter_mut().enumerate() {
            if b > 0 {
                fact *= b as f64;
            }
            row[j] = t.get(b).copied().unwrap_or_default() * fact;
        }
    }
    out
}

/// Values of `f` on the `m`-point grid of the unit circle.
pub fn boundary_grid(f: &DiscPoly, m: usize) -> Result<Vec<Vec<C>>> {
    let required = 2 * f.degree() + 1;
    if m < required {
        return Err(Error::GridTooSmall { required, got: m });
    }
    Ok(crate::unit_grid(m).into_iter().map(|z| f.eval(z)).collect())
}

/// The unique disc of degree `< d` with the prescribed jets.
pub fn hermite_basepoint(div: &Divisor, jets: &JetData) -> Result<DiscPoly> {
    let d = div.degree();
    let n = jets.dim();
    // rows are Taylor coefficients: C(k, b) zeta_a^(k - b) against a_{a,b} / b!
    let mut a = DMatrix::<C>::zeros(d, d);
    let mut rhs = DMatrix::<C>::zeros(d, n);
    let mut row = 0;
    for (alpha, &(z, mult)) in div.nodes().iter().enumerate() {
        let mut fact = 1.0;
        for b in 0..mult {
            if b > 0 {
                fact *= b as f64;
            }
            for k in b..d {
                a[(row, k)] = z.powu((k - b) as u32) * binomial(k, b);
            }
            for j in 0..n {
                rhs[(row, j)] = jets.at(alpha)[b][j] / fact;
            }
            row += 1;
        }
    }
    let lu = a.lu();
    let mut coeffs = vec![vec![C::new(0.0, 0.0); n]; d];
    for j in 0..n {
        let col = DVector::from_iterator(d, rhs.column(j).iter().copied());
        let sol = lu
            .solve(&col)
            .ok_or(Error::IllConditioned { residual: f64::INFINITY })?;
        for k in 0..d {
            coeffs[k][j] = sol[k];
        }
    }
    let f = DiscPoly { coeffs };
    let mut scale = 1.0f64;
    let mut resid = 0.0f64;
    for (alpha, &(z, mult)) in div.nodes().iter().enumerate() {
        let got = disc_jet(&f, z, mult - 1);
        for b in 0..mult {
            for j in 0..n {
                let want = jets.at(alpha)[b][j];
                scale = scale.max(want.norm());
                resid = resid.max((got[b][j] - want).norm());
            }
        }
    }
    let resid = resid / scale;
    if !resid.is_finite() || resid > 1e-8 {
        return Err(Error::IllConditioned { residual: resid });
    }
    Ok(f)
}

fn binomial(k: usize, b: usize) -> f64 {
    (0..b).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// The affine space `f0 + B q` of discs of degree `<= N` with fixed jets,
/// parametrized by the real and imaginary parts of `q`'s coefficients.
#[derive(Debug, Clone)]
pub struct AffineDiscSpace {
    pub(crate) f0: DiscPoly,
    pub(crate) b: Poly,
    pub(crate) degree: usize,
    pub(crate) n: usize,
    /// Number of free coefficients per coordinate, `N - d + 1`.
    pub(crate) nq: usize,
}

impl AffineDiscSpace {
    pub fn new(div: &Divisor, jets: &JetData, degree: usize) -> Result<Self> {
        let d = div.degree();
        if d > degree + 1 {
            return Err(Error::InfeasibleJets { degree: d, limit: degree + 1 });
        }
        let f0 = hermite_basepoint(div, jets)?;
        Ok(AffineDiscSpace { f0, b: div.poly(), degree, n: jets.dim(), nq: degree + 1 - d })
    }

    pub fn n_params(&self) -> usize {
        2 * self.n * self.nq
    }

    /// Index of `Re` (or `Im` with `+1`) of coefficient `k` in coordinate `j`.
    pub(crate) fn index(&self, j: usize, k: usize) -> usize {
        2 * (j * self.nq + k)
    }

    pub fn disc(&self, x: &[f64]) -> DiscPoly {
        let comps: Vec<Poly> = (0..self.n)
            .map(|j| {
                let q = Poly::new(
                    (0..self.nq)
                        .map(|k| {
                            let i = self.index(j, k);
                            C::new(x[i], x[i + 1])
                        })
                        .collect(),
                );
                self.f0.component(j).add(&self.b.mul(&q))
            })
            .collect();
        DiscPoly::from_components(&comps).padded(self.degree)
    }

    /// Coordinates of a disc in this space (least squares on coefficients).
    pub fn coordinates(&self, f: &DiscPoly) -> Vec<f64> {
        let mut x = vec![0.0; self.n_params()];
        for j in 0..self.n {
            let diff = f.component(j).add(&self.f0.component(j).scale(C::new(-1.0, 0.0)));
            let (q, _) = diff.div_rem(&self.b);
            for k in 0..self.nq.min(q.coeffs.len()) {
                let i = self.index(j, k);
                x[i] = q.coeffs[k].re;
                x[i + 1] = q.coeffs[k].im;
            }
        }
        x
    }
}
