//! Complex ellipsoids `sum_j (|z_j| / r_j)^(2 m_j) < 1`, `m_j >= 1/2`.

use crate::C;

const HALF_TOL: f64 = 1e-12;

fn is_half(m: f64) -> bool {
    (m - 0.5).abs() <= HALF_TOL
}

/// Unique `lambda > 0` with `sum (|z_j| / (lambda r_j))^(2 m_j) = 1`.
pub(crate) fn gauge(exps: &[f64], radii: &[f64], z: &[C]) -> f64 {
    let logs: Vec<Option<f64>> = z
        .iter()
        .zip(radii)
        .map(|(zj, r)| {
            let s = zj.norm() / r;
            (s > 0.0).then(|| s.ln())
        })
        .collect();
    let Some(start) = logs.iter().flatten().cloned().reduce(f64::max) else {
        return 0.0;
    };
    // Newton in u = ln(lambda) on a convex decreasing function, started
    // where it is nonnegative: monotone convergence from the left.
    let mut u = start;
    for _ in 0..200 {
        let mut g = -1.0;
        let mut dg = 0.0;
        for (ls, &m) in logs.iter().zip(exps) {
            if let Some(ls) = ls {
                let e = (2.0 * m * (ls - u)).exp();
                g += e;
                dg -= 2.0 * m * e;
            }
        }
        if g <= 0.0 {
            break;
        }
        let step = -g / dg;
        u += step;
        if step.abs() <= 1e-16 * u.abs().max(1.0) {
            break;
        }
    }
    u.exp()
}

/// Gradient functional at a nonzero `z`, normalized so that
/// `Re(z . w) = p(z)` and `p*(w) = 1`.
pub(crate) fn support(exps: &[f64], radii: &[f64], z: &[C], p: f64) -> Vec<C> {
    let mut g: Vec<C> = Vec::with_capacity(z.len());
    let mut denom = 0.0;
    for ((zj, &m), &r) in z.iter().zip(exps).zip(radii) {
        let zh = zj / p;
        let a = zh.norm();
        if a == 0.0 {
            g.push(C::new(0.0, 0.0));
            continue;
        }
        let s = a / r;
        // m |zh|^(2m-2) conj(zh) / r^(2m) = m s^(2m-1) / r * conj(zh) / |zh|
        g.push(zh.conj() / a * (m * s.powf(2.0 * m - 1.0) / r));
        denom += m * s.powf(2.0 * m);
    }
    let c = 1.0 / denom;
    g.into_iter().map(|x| x * c).collect()
}

/// Dual gauge and a maximizing boundary point `z*` with
/// `Re(z* . w) = p*(w)`.
///
/// Computed from the one-dimensional Lagrangian dual
/// `p*(w) = min_{mu >= 0} mu + sum_j sup_{t >= 0} (sigma_j t - mu t^(2 m_j))`
/// with `sigma_j = r_j |w_j|`.
pub(crate) fn dual(exps: &[f64], radii: &[f64], w: &[C]) -> (f64, Vec<C>) {
    let n = w.len();
    let sigma: Vec<f64> = w.iter().zip(radii).map(|(x, r)| r * x.norm()).collect();
    let q: Vec<f64> = exps.iter().map(|m| 2.0 * m).collect();
    let mut mu_min = 0.0f64;
    for j in 0..n {
        if is_half(exps[j]) {
            mu_min = mu_min.max(sigma[j]);
        }
    }
    let smooth: Vec<usize> = (0..n).filter(|&j| !is_half(exps[j]) && sigma[j] > 0.0).collect();
    if smooth.is_empty() && mu_min == 0.0 {
        return (0.0, vec![C::new(0.0, 0.0); n]);
    }
    // T(mu) = sum_smooth (sigma_j / (q_j mu))^(q_j / (q_j - 1)); phi'(mu) = 1 - T(mu)
    let log_t = |v: f64| -> (f64, f64) {
        let mut t = 0.0;
        let mut dt = 0.0;
        for &j in &smooth {
            let e = q[j] / (q[j] - 1.0);
            let term = (e * ((sigma[j] / q[j]).ln() - v)).exp();
            t += term;
            dt -= e * term;
        }
        (t, dt)
    };
    let mu_star = if smooth.is_empty() {
        mu_min
    } else {
        let at_min = if mu_min > 0.0 { log_t(mu_min.ln()).0 } else { f64::INFINITY };
        if at_min <= 1.0 {
            mu_min
        } else {
            let floor = smooth
                .iter()
                .map(|&j| (sigma[j] / q[j]).ln())
                .fold(f64::INFINITY, f64::min);
            let mut v = if mu_min > 0.0 { floor.max(mu_min.ln()) } else { floor };
            for _ in 0..200 {
                let (t, dt) = log_t(v);
                let g = t - 1.0;
                if g <= 0.0 {
                    break;
                }
                let step = -g / dt;
                v += step;
                if step.abs() <= 1e-16 * v.abs().max(1.0) {
                    break;
                }
            }
            v.exp()
        }
    };
    let mut z = vec![C::new(0.0, 0.0); n];
    let mut value = mu_star;
    let mut used = 0.0;
    for &j in &smooth {
        let tj = (sigma[j] / (q[j] * mu_star)).powf(1.0 / (q[j] - 1.0));
        let tq = tj.powf(q[j]);
        value += sigma[j] * tj - mu_star * tq;
        used += tq;
        z[j] = w[j].conj() / w[j].norm() * (radii[j] * tj);
    }
    let slack = (1.0 - used).max(0.0);
    if slack > 0.0 && mu_min > 0.0 {
        if let Some(j) = (0..n).find(|&j| is_half(exps[j]) && sigma[j] >= mu_star * (1.0 - 1e-12)) {
            z[j] = w[j].conj() / w[j].norm() * (radii[j] * slack);
        }
    }
    (value, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_matches_quadratic_closed_form() {
        // (0.5/l)^2 + (0.5/l)^4 = 1  ->  x = (0.5/l)^2 = (sqrt5 - 1)/2
        let x = (5f64.sqrt() - 1.0) / 2.0;
        let expect = 0.5 / x.sqrt();
        let got = gauge(&[1.0, 2.0], &[1.0, 1.0], &[C::new(0.5, 0.0), C::new(0.5, 0.0)]);
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn dual_of_euclidean_case_is_norm() {
        let w = [C::new(0.3, -0.4), C::new(1.2, 0.5)];
        let (v, z) = dual(&[1.0, 1.0], &[1.0, 1.0], &w);
        let nw = (0.25f64 + 1.69).sqrt();
        assert!((v - nw).abs() < 1e-13);
        let pz = gauge(&[1.0, 1.0], &[1.0, 1.0], &z);
        assert!((pz - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_of_l1_case_is_max() {
        let w = [C::new(0.3, -0.4), C::new(0.2, 0.1)];
        let (v, z) = dual(&[0.5, 0.5], &[1.0, 1.0], &w);
        assert!((v - 0.5).abs() < 1e-14);
        assert!((z[0].norm() - 1.0).abs() < 1e-14);
    }
}
