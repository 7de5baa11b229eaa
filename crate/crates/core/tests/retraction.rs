use extremal_disc::dual::build_stationary;
use extremal_disc::metrics::kobayashi_metric;
use extremal_disc::retraction::{bezout_pair, check_retraction};
use extremal_disc::sampling::{in_disc, interior_points, rng};
use extremal_disc::{norm, unit_grid, ConvexBody, FlatteningMap, MetricOptions, Poly, C};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn flattening(body: &ConvexBody, a: &[C], v: &[C], degree: usize) -> FlatteningMap {
    let opts = MetricOptions { degree, ..Default::default() };
    let r = kobayashi_metric(body, a, v, &opts).unwrap();
    let cert = r.certificate.expect("certificate");
    let pair = build_stationary(&r.extremal_disc, &cert.h, 1e-4).unwrap();
    FlatteningMap::new(pair).unwrap()
}

fn dist(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn ellipsoid() -> ConvexBody {
    ConvexBody::complex_ellipsoid(vec![1.0, 2.0], vec![1.0, 1.0]).unwrap()
}

#[test]
fn ball_retraction_is_orthogonal_projection() {
    // extremal discs through the origin are complex lines; the retraction projects onto them
    let ball = ConvexBody::ball(2).unwrap();
    let s = 1.0 / 5f64.sqrt();
    let u = [c(s, 0.0), c(0.0, 2.0 * s)];
    let map = flattening(&ball, &[c(0.0, 0.0); 2], &u, 8);
    for z in interior_points(&ball, 20, 0.9, 4) {
        let w: C = u.iter().zip(&z).map(|(a, b)| a.conj() * b).sum();
        let expect: Vec<C> = u.iter().map(|a| a * w).collect();
        let g = map.retract(&z).unwrap();
        assert!(dist(&g, &expect) < 1e-8, "{g:?} {expect:?}");
    }
}

#[test]
fn bezout_examples() {
    let one = Poly::one();
    // (zeta - 2) . 0 + 1 . 1 = 1, or any equivalent pair
    let p = [Poly::new(vec![c(-2.0, 0.0), c(1.0, 0.0)]), Poly::one()];
    let bp = bezout_pair(&p, &one).unwrap();
    assert!(bp.residual < 1e-12);
    // zeta . (1/2) + (1 - zeta/2) . 1 = 1
    let q = [Poly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]), Poly::new(vec![c(1.0, 0.0), c(-0.5, 0.0)])];
    let bq = bezout_pair(&q, &one).unwrap();
    for z in unit_grid(64).into_iter().chain([c(0.0, 0.0), c(0.3, -0.4)]) {
        let lhs = bq.g.eval(z) * q[bq.j1].eval(z) + bq.h.eval(z) * q[bq.j2].eval(z);
        assert!((lhs - 1.0).norm() < 1e-12, "{lhs}");
    }
    // a common zero inside the disc has no pair
    let r = [Poly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]), Poly::new(vec![c(0.0, 0.0), c(0.0, 2.0)])];
    assert!(bezout_pair(&r, &one).is_err());
}

#[test]
fn candidate_is_holomorphic() {
    let body = ellipsoid();
    let map = flattening(&body, &[c(0.2, 0.1), c(0.1, -0.2)], &[c(1.0, 0.0), c(0.2, 0.5)], 24);
    let eps = 1e-5;
    for z in interior_points(&body, 8, 0.8, 9) {
        for k in 0..2 {
            let mut e = [c(0.0, 0.0); 2];
            e[k] = c(1.0, 0.0);
            let at = |d: C| {
                let w: Vec<C> = z.iter().zip(&e).map(|(x, y)| x + y * d).collect();
                map.caratheodory_candidate(&w).unwrap()
            };
            let dx = (at(c(eps, 0.0)) - at(c(-eps, 0.0))) / (2.0 * eps);
            let dy = (at(c(0.0, eps)) - at(c(0.0, -eps))) / (2.0 * eps);
            // 2 dbar = d/dx + i d/dy
            let dbar = (dx + c(0.0, 1.0) * dy) / 2.0;
            assert!(dbar.norm() < 1e-6, "{dbar}");
            let analytic = map.candidate_derivative(&z, &e).unwrap();
            assert!((analytic - dx).norm() < 1e-6 * (1.0 + dx.norm()), "{analytic} {dx}");
        }
    }
}

#[test]
fn ellipsoid_retraction_suite() {
    let body = ellipsoid();
    let map = flattening(&body, &[c(0.2, 0.1), c(0.1, -0.2)], &[c(1.0, 0.0), c(0.2, 0.5)], 32);
    let chk = check_retraction(&body, &map, 100, 21);
    assert!(chk.pass(1e-9), "{chk:?}");
    assert!(chk.disc_identity <= 1e-10 && chk.left_inverse <= 1e-9, "{chk:?}");
    // Phi is invertible on the body
    for z in interior_points(&body, 20, 0.9, 22) {
        let zeta = map.full_inverse(&z).unwrap();
        assert!(dist(&map.phi(&zeta).unwrap(), &z) < 1e-9 * norm(&z).max(1.0));
    }
}

#[test]
fn one_dimensional_retraction_is_identity() {
    let disc = ConvexBody::ball(1).unwrap();
    let a = c(0.3, -0.2);
    let map = flattening(&disc, &[a], &[c(0.5, 0.5)], 32);
    let mut g = rng(3);
    for _ in 0..50 {
        let z = in_disc(&mut g, 0.9);
        let r = map.retract(&[z]).unwrap();
        assert!((r[0] - z).norm() < 1e-10, "{} {}", r[0], z);
        assert!(map.boundary_sign_min(&[z], 256) > 0.0);
    }
}
