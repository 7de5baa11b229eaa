//! Thin builder over the clarabel interior-point solver.
//!
//! Rows are written as affine expressions `e(x)` that must lie in a cone;
//! clarabel's form is `s = b - A x`, so each expression contributes
//! `A = -coefficients`, `b = constant`.

use crate::error::{Error, Result};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

#[derive(Debug, Clone, Default)]
pub(crate) struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine { terms: Vec::new(), constant: c }
    }

    pub fn var(v: usize) -> Self {
        Affine { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn scaled_var(v: usize, s: f64) -> Self {
        Affine { terms: vec![(v, s)], constant: 0.0 }
    }

    pub fn add_term(&mut self, v: usize, c: f64) {
        if c != 0.0 {
            self.terms.push((v, c));
        }
    }

    pub fn scale(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= s;
        }
        self.constant *= s;
        self
    }

}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ConicTolerances {
    pub gap_abs: f64,
    pub gap_rel: f64,
    pub feas: f64,
    pub max_iter: u32,
}

impl Default for ConicTolerances {
    fn default() -> Self {
        ConicTolerances { gap_abs: 1e-11, gap_rel: 1e-11, feas: 1e-11, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ConicSolution {
    pub x: Vec<f64>,
    pub obj_dual: f64,
    pub iterations: usize,
}

#[derive(Debug, Default)]
pub(crate) struct ConicBuilder {
    n_vars: usize,
    cost: Vec<f64>,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
}

impl ConicBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self) -> usize {
        self.n_vars += 1;
        self.cost.push(0.0);
        self.n_vars - 1
    }

    pub fn add_vars(&mut self, k: usize) -> std::ops::Range<usize> {
        let start = self.n_vars;
        for _ in 0..k {
            self.add_var();
        }
        start..self.n_vars
    }

    pub fn set_cost(&mut self, v: usize, c: f64) {
        self.cost[v] = c;
    }

    fn push_rows(&mut self, exprs: &[Affine]) {
        for e in exprs {
            let row = self.b.len();
            for &(v, c) in &e.terms {
                self.rows.push(row);
                self.cols.push(v);
                self.vals.push(-c);
            }
            self.b.push(e.constant);
        }
    }

    /// `e = 0` for each expression.
    pub fn zero(&mut self, exprs: &[Affine]) {
        if exprs.is_empty() {
            return;
        }
        self.push_rows(exprs);
        match self.cones.last_mut() {
            Some(SupportedConeT::ZeroConeT(k)) => *k += exprs.len(),
            _ => self.cones.push(SupportedConeT::ZeroConeT(exprs.len())),
        }
    }

    /// `e >= 0` for each expression.
    pub fn nonneg(&mut self, exprs: &[Affine]) {
        if exprs.is_empty() {
            return;
        }
        self.push_rows(exprs);
        match self.cones.last_mut() {
            Some(SupportedConeT::NonnegativeConeT(k)) => *k += exprs.len(),
            _ => self.cones.push(SupportedConeT::NonnegativeConeT(exprs.len())),
        }
    }

    /// `e_0 >= |(e_1, ..., e_k)|`.
    pub fn soc(&mut self, exprs: &[Affine]) {
        self.push_rows(exprs);
        self.cones.push(SupportedConeT::SecondOrderConeT(exprs.len()));
    }

    /// `x^alpha y^(1 - alpha) >= |z|`, `x, y >= 0`.
    pub fn power(&mut self, x: Affine, y: Affine, z: Affine, alpha: f64) {
        self.push_rows(&[x, y, z]);
        self.cones.push(SupportedConeT::PowerConeT(alpha));
    }

    pub fn solve(&self, tol: ConicTolerances) -> Result<ConicSolution> {
        let n = self.n_vars;
        let m = self.b.len();
        let p = CscMatrix::zeros((n, n));
        let a = CscMatrix::new_from_triplets(
            m,
            n,
            self.rows.clone(),
            self.cols.clone(),
            self.vals.clone(),
        );
        let settings = DefaultSettings {
            verbose: false,
            max_iter: tol.max_iter,
            tol_gap_abs: tol.gap_abs,
            tol_gap_rel: tol.gap_rel,
            tol_feas: tol.feas,
            tol_ktratio: 1e-7,
            presolve_enable: false,
            ..DefaultSettings::default()
        };
        let mut solver = DefaultSolver::new(&p, &self.cost, &a, &self.b, &self.cones, settings)
            .map_err(|e| Error::Solver(format!("setup: {e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {}
            // the iterate is usually still excellent when progress stalls at
            // tight tolerances; callers recheck every value independently
            SolverStatus::InsufficientProgress | SolverStatus::MaxIterations
                if sol.x.iter().all(|v| v.is_finite()) && sol.r_prim < 1e-6 => {}
            s => return Err(Error::Solver(format!("interior point status {s:?}"))),
        }
        Ok(ConicSolution {
            x: sol.x.clone(),
            obj_dual: sol.obj_val_dual,
            iterations: sol.iterations as usize,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (1.6, 1.2)
        let mut b = ConicBuilder::new();
        let x = b.add_var();
        let y = b.add_var();
        b.set_cost(x, -1.0);
        b.set_cost(y, -1.0);
        let mut r1 = Affine::constant(4.0);
        r1.add_term(x, -1.0);
        r1.add_term(y, -2.0);
        let mut r2 = Affine::constant(6.0);
        r2.add_term(x, -3.0);
        r2.add_term(y, -1.0);
        b.nonneg(&[r1, r2, Affine::var(x), Affine::var(y)]);
        let s = b.solve(ConicTolerances::default()).unwrap();
        assert!((s.x[0] - 1.6).abs() < 1e-8);
        assert!((s.x[1] - 1.2).abs() < 1e-8);
    }

    #[test]
    fn power_cone_root() {
        // max z s.t. (x, 1, z) in K_pow(1/2), x <= 4  -> z = 2
        let mut b = ConicBuilder::new();
        let x = b.add_var();
        let z = b.add_var();
        b.set_cost(z, -1.0);
        b.power(Affine::var(x), Affine::constant(1.0), Affine::var(z), 0.5);
        let mut cap = Affine::constant(4.0);
        cap.add_term(x, -1.0);
        b.nonneg(&[cap]);
        let s = b.solve(ConicTolerances::default()).unwrap();
        assert!((s.x[1] - 2.0).abs() < 1e-7);
    }
}
