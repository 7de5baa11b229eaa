use extremal_disc::formats::{load_disc, load_dual, load_json, save_disc, save_dual, save_json, BodySpec, Format, QueryFile};
use extremal_disc::sampling::{gaussian, rng};
use extremal_disc::{DiscPoly, Divisor, DualCertificate, DualElement, Poly, C};
use std::path::PathBuf;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("extremal-disc-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn max_diff(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn disc_and_dual_round_trip() {
    let mut r = rng(99);
    let f = DiscPoly::new((0..12).map(|_| gaussian(&mut r, 3)).collect()).unwrap();
    let path = scratch("f.disc.json");
    save_disc(&path, &f).unwrap();
    let g = load_disc(&path).unwrap();
    let grid: Vec<C> = extremal_disc::unit_grid(32);
    let fe: Vec<Vec<C>> = grid.iter().map(|&z| f.eval(z)).collect();
    let ge: Vec<Vec<C>> = grid.iter().map(|&z| g.eval(z)).collect();
    assert!(max_diff(&fe, &ge) <= 1e-15 * f.max_abs_coeff() * 12.0);
    assert_eq!(f, g);

    let div = Divisor::new(vec![(C::new(0.0, 0.0), 2), (C::new(0.3, -0.2), 1)]).unwrap();
    let q = DiscPoly::new((0..5).map(|_| gaussian(&mut r, 3)).collect()).unwrap();
    let h = DualElement::new(div.clone(), q, div.reflected_poly().mul(&Poly::constant(C::new(2.0, 0.5)))).unwrap();
    let path = scratch("h.dual.json");
    save_dual(&path, &h).unwrap();
    let k = load_dual(&path).unwrap();
    let he: Vec<Vec<C>> = grid.iter().map(|&z| h.eval(z)).collect();
    let ke: Vec<Vec<C>> = grid.iter().map(|&z| k.eval(z)).collect();
    assert!(max_diff(&he, &ke) <= 1e-15);
}

#[test]
fn certificate_round_trip() {
    let body = extremal_disc::ConvexBody::ball(2).unwrap();
    let (div, jets) = extremal_disc::JetData::metric(&[C::new(0.1, 0.0), C::new(0.0, 0.2)], &[C::new(1.0, 0.0), C::new(0.0, 0.5)]).unwrap();
    let opts = extremal_disc::dual::DualOptions { degree: 6, ..Default::default() };
    let cert = extremal_disc::dual::solve_dual(&body, &div, &jets, &opts).unwrap();
    let path = scratch("cert.json");
    save_json(&path, &cert).unwrap();
    let back: DualCertificate = load_json(&path).unwrap();
    assert_eq!(back.dual_norm, cert.dual_norm);
    assert_eq!(back.h, cert.h);
}

#[test]
fn corrupted_files_rejected() {
    let path = scratch("bad.disc.json");
    // rows of different lengths
    std::fs::write(&path, r#"{"coeffs":[[[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]}"#).unwrap();
    assert!(load_disc(&path).is_err());
    std::fs::write(&path, "not json").unwrap();
    assert!(load_disc(&path).is_err());
    assert!(load_disc(&scratch("missing.json")).is_err());
}

#[test]
fn specs_survive_both_formats() {
    let spec = BodySpec::parse("kind = \"complex_ellipsoid\"\ndim = 2\nexponents = [1.0, 2.0]\nradii = [1.0, 0.5]\n", Format::Toml).unwrap();
    let json = serde_json::to_string(&spec).unwrap();
    assert_eq!(BodySpec::parse(&json, Format::Json).unwrap(), spec);
    let body = spec.build().unwrap();
    assert_eq!(body.dim(), 2);

    let text = r#"
[[query]]
id = "m1"
type = "metric"
a = [[0.1, 0.0], [0.0, 0.0]]
v = [[1.0, 0.0], [0.0, 0.0]]

[[query]]
type = "distance"
a = [[0.0, 0.0], [0.0, 0.0]]
b = [[0.5, 0.0], [0.0, 0.0]]
tol = 1e-5
"#;
    let qf = QueryFile::parse(text, Format::Toml).unwrap();
    let json = serde_json::to_string(&qf).unwrap();
    let again = QueryFile::parse(&json, Format::Json).unwrap();
    assert_eq!(again, qf);
    let qs = again.queries(2).unwrap();
    assert_eq!(qs[0].id, "m1");
    assert_eq!(qs[1].id, "2");
    assert_eq!(qs[1].tol, Some(1e-5));
}
