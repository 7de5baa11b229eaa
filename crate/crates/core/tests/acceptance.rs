//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use extremal_disc::dual::{
    build_stationary, certify, divisor_multiplier, jet_pairing, jets_of, solve_dual, CertifyTolerances, DualOptions,
};
use extremal_disc::metrics::{kobayashi_distance, kobayashi_metric, verify_ck_equality};
use extremal_disc::primal::{solve_primal, sup_gauge};
use extremal_disc::retraction::check_retraction;
use extremal_disc::sampling::{gaussian, in_disc, interior_points, rng, sphere_samples};
use extremal_disc::table::{closed_form_table, table_csv, TableOptions};
use extremal_disc::{
    norm, pairing, ConvexBody, DiscPoly, Divisor, DualElement, FlatteningMap, GaugeOracle, JetData,
    MetricOptions, PrimalOptions, C,
};
use rand::Rng;
use std::sync::Arc;
use std::time::Instant;

const N: usize = 32;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ellipsoid() -> ConvexBody {
    ConvexBody::complex_ellipsoid(vec![1.0, 2.0], vec![1.0, 1.0]).unwrap()
}

fn three_bodies() -> Vec<ConvexBody> {
    vec![ConvexBody::ball(2).unwrap(), ConvexBody::polydisc(vec![1.0, 1.0]).unwrap(), ellipsoid()]
}

/// Point of gauge `r` in a random direction.
fn point_at<R: Rng>(g: &mut R, body: &ConvexBody, r: f64) -> Vec<C> {
    let u = sphere_samples(body.dim(), 1, g.random())[0].clone();
    let p = body.gauge_eval(&u).unwrap();
    u.iter().map(|x| x * (r / p)).collect()
}

fn random_problem<R: Rng>(g: &mut R, body: &ConvexBody, k: usize) -> (Divisor, JetData) {
    let r = 0.4 * g.random::<f64>();
    let a = point_at(g, body, r);
    if k.is_multiple_of(2) {
        JetData::metric(&a, &gaussian(g, body.dim())).unwrap()
    } else {
        let r = 0.5 * g.random::<f64>();
        let b = point_at(g, body, r);
        JetData::distance(&a, &b, 0.2 + 0.5 * g.random::<f64>()).unwrap()
    }
}

fn duality() -> Outcome {
    let mut g = rng(101);
    let mut worst_low = f64::INFINITY;
    let mut worst_high = 0.0f64;
    let mut slowest = 0.0f64;
    let mut ok = true;
    for k in 0..20 {
        let body = &three_bodies()[k % 3];
        let (div, jets) = random_problem(&mut g, body, k / 3);
        let start = Instant::now();
        let p = solve_primal(body, &div, &jets, &PrimalOptions { degree: N, ..Default::default() }).unwrap();
        let d = solve_dual(body, &div, &jets, &DualOptions { degree: N, ..Default::default() }).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let prod = p.value * d.dual_norm;
        // 1e-12 absorbs rounding in the product itself
        ok &= prod >= 1.0 - d.quadrature_error - 1e-12 && prod <= 1.0 + 1e-3 && secs <= 30.0;
        worst_low = worst_low.min(prod - 1.0 + d.quadrature_error);
        worst_high = worst_high.max(prod - 1.0);
        slowest = slowest.max(secs);
    }
    outcome(
        ok,
        format!("20 queries, min(mM - 1 + q_err) = {worst_low:.2e}, max(mM - 1) = {worst_high:.2e}, slowest {slowest:.1}s"),
    )
}

fn schwarz_pick() -> Outcome {
    let disc = ConvexBody::unit_disc();
    let opts = MetricOptions { degree: N, ..Default::default() };
    let mut g = rng(202);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let r = 0.05 + 0.09 * k as f64;
        let b = C::from_polar(r, std::f64::consts::TAU * g.random::<f64>());
        let d = kobayashi_distance(&disc, &[c(0.0, 0.0)], &[b], &opts).unwrap();
        let exact = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        worst = worst.max((d.upper - exact).abs()).max((d.lower - exact).abs());
    }
    let v = c(0.3, -1.2);
    let m = kobayashi_metric(&disc, &[c(0.0, 0.0)], &[v], &opts).unwrap();
    let werr = (m.upper - v.norm()).abs().max((m.lower - v.norm()).abs());
    outcome(worst <= 1e-5 && werr <= 1e-5, format!("distance error {worst:.2e} over 10 points, metric error {werr:.2e}"))
}

fn closed_forms() -> Outcome {
    let opts = MetricOptions { degree: N, ..Default::default() };
    let mut g = rng(303);
    let mut worst = [0.0f64; 2];
    let bodies = [ConvexBody::ball(2).unwrap(), ConvexBody::polydisc(vec![1.0, 1.0]).unwrap()];
    for _ in 0..10 {
        let v = gaussian(&mut g, 2);
        // Schwarz lemma: |v| on the ball, max |v_j| on the bidisc
        let exact = [norm(&v), v.iter().map(|x| x.norm()).fold(0.0, f64::max)];
        for (i, body) in bodies.iter().enumerate() {
            let r = kobayashi_metric(body, &[c(0.0, 0.0); 2], &v, &opts).unwrap();
            let e = (r.upper - exact[i]).abs().max((r.lower - exact[i]).abs()) / exact[i].max(1.0);
            worst[i] = worst[i].max(e);
        }
    }
    outcome(
        worst[0] <= 1e-4 && worst[1] <= 1e-4,
        format!("ball error {:.2e}, polydisc error {:.2e} over 10 directions", worst[0], worst[1]),
    )
}

fn flatness_alignment() -> Outcome {
    let mut g = rng(404);
    let mut worst_flat = 0.0f64;
    let mut worst_align = 0.0f64;
    let mut ok = true;
    for body in [ConvexBody::ball(2).unwrap(), ellipsoid()] {
        for k in 0..4 {
            let (div, jets) = random_problem(&mut g, &body, k);
            let p = solve_primal(&body, &div, &jets, &PrimalOptions { degree: N, ..Default::default() }).unwrap();
            let d = solve_dual(&body, &div, &jets, &DualOptions { degree: N, ..Default::default() }).unwrap();
            let tol = CertifyTolerances { gap: 1e-3, flatness: 1e-3 * p.value, alignment: 1e-3, grid: None };
            let rep = certify(&body, &p.f, &d.h, &tol, 8 * N).unwrap();
            ok &= rep.pass_flatness && rep.pass_alignment;
            worst_flat = worst_flat.max(rep.flatness / p.value);
            worst_align = worst_align.max(rep.alignment);
        }
    }
    outcome(ok, format!("max flatness/m = {worst_flat:.2e}, max alignment = {worst_align:.2e} on 8 problems"))
}

fn multiplier_transfer() -> Outcome {
    let tol = CertifyTolerances { gap: 1e-9, flatness: 1e-9, alignment: 1e-9, grid: None };
    let cases = [
        (Divisor::at_origin(2).unwrap(), Divisor::at_origin(3).unwrap(), 1.0),
        (Divisor::new(vec![(c(0.0, 0.0), 1), (c(0.5, 0.0), 1)]).unwrap(), Divisor::at_origin(2).unwrap(), 0.25),
    ];
    let ball = ConvexBody::ball(2).unwrap();
    let mut ok = true;
    let mut mins = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (div, new, expect_min) in cases {
        let phi = divisor_multiplier(&div, &new, 8 * N).unwrap();
        ok &= (phi.min_on_circle() - expect_min).abs() <= 1e-12;
        mins.push(phi.min_on_circle());
        for u in sphere_samples(2, 5, 505) {
            let f = DiscPoly::new(vec![vec![c(0.0, 0.0); 2], u.clone()]).unwrap();
            let conj: Vec<C> = u.iter().map(|x| x.conj()).collect();
            let h = DualElement::new(div.clone(), DiscPoly::constant(&conj), div.reflected_poly()).unwrap();
            let before = certify(&ball, &f, &h, &tol, 8 * N).unwrap();
            let after = certify(&ball, &f, &phi.apply(&h, &new).unwrap(), &tol, 8 * N).unwrap();
            let infl = (after.gap.abs() - before.gap.abs())
                .max(after.flatness - before.flatness)
                .max(after.alignment - before.alignment);
            worst = worst.max(infl);
            ok &= before.pass && after.pass && infl <= 1e-9;
        }
    }
    outcome(ok, format!("grid minima {:.3} and {:.3}, max residual inflation {worst:.2e}", mins[0], mins[1]))
}

fn ck_equality() -> Outcome {
    let opts = MetricOptions { degree: N, ..Default::default() };
    let bodies = [ConvexBody::ball(2).unwrap(), ellipsoid(), ConvexBody::unit_disc()];
    let mut g = rng(606);
    let mut worst = 0.0f64;
    let mut fails = 0;
    let mut weak = 0;
    for body in &bodies {
        for _ in 0..3 {
            let r = 0.1 + 0.4 * g.random::<f64>();
            let a = point_at(&mut g, body, r);
            for _ in 0..3 {
                let v = gaussian(&mut g, body.dim());
                let rep = verify_ck_equality(body, &a, &v, &opts, 1e-3).unwrap();
                worst = worst.max(rep.difference);
                fails += usize::from(!rep.pass);
                weak += usize::from(rep.weak);
            }
        }
    }
    outcome(fails == 0, format!("27 cases, max K_upper - C_lower = {worst:.2e}, {fails} failed, {weak} used linear candidates"))
}

fn extremal_map(body: &ConvexBody, a: &[C], v: &[C]) -> FlatteningMap {
    let r = kobayashi_metric(body, a, v, &MetricOptions { degree: N, ..Default::default() }).unwrap();
    let pair = build_stationary(&r.extremal_disc, &r.certificate.unwrap().h, 1e-4).unwrap();
    FlatteningMap::new(pair).unwrap()
}

fn retraction_suite() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let cases = [
        (ConvexBody::ball(2).unwrap(), vec![c(0.2, 0.1), c(-0.1, 0.3)], vec![c(0.5, 0.0), c(0.1, 1.0)]),
        (ellipsoid(), vec![c(0.2, 0.1), c(0.1, -0.2)], vec![c(1.0, 0.0), c(0.2, 0.5)]),
    ];
    for (body, a, v) in cases {
        let map = extremal_map(&body, &a, &v);
        // idempotence and winding on 1000 interior points
        let big = check_retraction(&body, &map, 1000, 707);
        // identity on 100 disc points
        let small = check_retraction(&body, &map, 100, 708);
        // boundary sign on the full 8N grid for 10 points
        let sign = interior_points(&body, 10, 0.95, 709)
            .iter()
            .map(|z| map.boundary_sign_min(z, 8 * N))
            .fold(f64::INFINITY, f64::min);
        let pass = big.idempotence <= 1e-9 && big.winding_failures == 0 && small.disc_identity <= 1e-10 && sign > 0.0;
        ok &= pass;
        parts.push(format!(
            "{}: idem {:.1e}, identity {:.1e}, winding failures {}, sign min {:.2e}",
            body.kind_name(),
            big.idempotence,
            small.disc_identity,
            big.winding_failures,
            sign
        ));
    }
    outcome(ok, parts.join("; "))
}

#[derive(Debug)]
struct L4;

impl GaugeOracle for L4 {
    fn dim(&self) -> usize {
        2
    }
    fn gauge(&self, z: &[C]) -> f64 {
        z.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>().powf(0.25)
    }
}

fn gauge_axioms() -> (bool, String) {
    let mut bodies = three_bodies();
    bodies.push(ConvexBody::oracle(Arc::new(L4), 2f64.powf(0.25)).unwrap());
    let mut g = rng(808);
    let mut bad = 0;
    for body in &bodies {
        for _ in 0..1000 {
            let z = gaussian(&mut g, 2);
            let y = gaussian(&mut g, 2);
            let w = gaussian(&mut g, 2);
            let t = 3.0 * g.random::<f64>();
            let p = body.gauge_eval(&z).unwrap();
            let py = body.gauge_eval(&y).unwrap();
            let s: Vec<C> = z.iter().zip(&y).map(|(a, b)| a + b).collect();
            let tz: Vec<C> = z.iter().map(|a| a * t).collect();
            let cc = body.comparability();
            let d = body.dual_gauge_eval(&w).unwrap();
            let checks = [
                p > 0.0,
                (body.gauge_eval(&tz).unwrap() - t * p).abs() <= 1e-12 * (1.0 + t * p),
                body.gauge_eval(&s).unwrap() <= (p + py) * (1.0 + 1e-12),
                norm(&z) / cc <= p * (1.0 + 1e-12) && p <= cc * norm(&z) * (1.0 + 1e-12),
                pairing(&z, &w).re <= p * d + 1e-9 * (1.0 + p * d),
            ];
            bad += checks.iter().filter(|&&x| !x).count();
        }
    }
    (bad == 0, format!("axioms and Fenchel on 4 bodies x 1000 samples: {bad} violations"))
}

fn annihilation() -> (bool, String) {
    let mut g = rng(809);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let nodes = vec![(c(0.0, 0.0), g.random_range(1..3)), (in_disc(&mut g, 0.7) + 0.01, g.random_range(1..3))];
        let div = Divisor::new(nodes).unwrap();
        let n = g.random_range(1..4);
        let q = DiscPoly::new((0..4).map(|_| gaussian(&mut g, n)).collect()).unwrap();
        let h = DualElement::new(div.clone(), q, div.reflected_poly()).unwrap();
        let gd = DiscPoly::new((0..4).map(|_| gaussian(&mut g, n)).collect()).unwrap();
        let f = gd.scalar_mul(&div.poly());
        worst = worst.max(jet_pairing(&h, &jets_of(&f, &div).unwrap()).unwrap().norm());
    }
    (worst < 1e-12, format!("max |pairing| over 100 zero-jet discs {worst:.1e}"))
}

fn degree_monotone() -> (bool, String) {
    let body = ellipsoid();
    let (div, jets) = JetData::distance(&[c(0.1, 0.2), c(0.0, -0.3)], &[c(-0.2, 0.1), c(0.3, 0.1)], 0.4).unwrap();
    let mut vals = Vec::new();
    for degree in [16, 32, 64] {
        let sol = solve_primal(&body, &div, &jets, &PrimalOptions { degree, ..Default::default() }).unwrap();
        vals.push(sup_gauge(&body, &sol.f, 16384).unwrap());
    }
    let ok = vals[1] <= vals[0] + 1e-6 && vals[2] <= vals[1] + 1e-6;
    (ok, format!("sup p(f) for N = 16, 32, 64: {:.8}, {:.8}, {:.8}", vals[0], vals[1], vals[2]))
}

fn csv_determinism() -> (bool, String) {
    let opts = TableOptions { metric: MetricOptions { degree: 16, ..Default::default() }, seed: 11, cases: 1, tol: 1e-4 };
    let a = table_csv(&closed_form_table(&opts).unwrap()).unwrap();
    let b = table_csv(&closed_form_table(&opts).unwrap()).unwrap();
    (a == b, format!("closed-form table CSV of {} bytes reproduced: {}", a.len(), a == b))
}

fn property_suites() -> Outcome {
    let parts = [gauge_axioms(), annihilation(), degree_monotone(), csv_determinism()];
    let ok = parts.iter().all(|p| p.0);
    outcome(ok, parts.iter().map(|p| p.1.as_str()).collect::<Vec<_>>().join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("duality identity", duality),
        ("Schwarz-Pick on the disc", schwarz_pick),
        ("ball and polydisc closed forms", closed_forms),
        ("flatness and alignment", flatness_alignment),
        ("multiplier transfer", multiplier_transfer),
        ("Carathéodory equals Kobayashi", ck_equality),
        ("retraction suite", retraction_suite),
        ("property suites", property_suites),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let o = std::panic::catch_unwind(f)
                        .unwrap_or_else(|_| outcome(false, "panicked".into()));
                    (o, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (k, ((name, _), (o, secs))) in criteria.iter().zip(&results).enumerate() {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} ({name}): {status} [{secs:.1}s] {}", k + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
