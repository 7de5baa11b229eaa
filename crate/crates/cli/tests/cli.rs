use extremal_disc::{DiscPoly, Divisor, DualElement, C};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_extremal-disc"));
    // keep the caller's environment from leaking into the flags
    for (k, _) in std::env::vars() {
        if k.starts_with("EXTREMAL_DISC_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    if !out.status.success() {
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

const DISC: &str = "kind = \"disc\"\ndim = 1\n";

const DISC_QUERIES: &str = r#"
[[query]]
id = "half"
type = "distance"
a = [[0.0, 0.0]]
b = [[0.5, 0.0]]

[[query]]
id = "m0"
type = "metric"
a = [[0.0, 0.0]]
v = [[0.6, 0.8]]
"#;

/// Rows of a CSV file as string maps keyed by the header.
fn csv_rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect())
        .collect()
}

#[test]
fn distance_on_the_disc_brackets_artanh() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "disc.toml", DISC);
    let queries = write(dir.path(), "q.toml", DISC_QUERIES);
    let out_dir = dir.path().join("out");
    let out = run(bin()
        .arg("distance")
        .arg("--body")
        .arg(&body)
        .arg("--queries")
        .arg(&queries)
        .arg("--degree")
        .arg("16")
        .arg("--out")
        .arg(&out_dir));
    assert!(out.status.success());
    let rows = csv_rows(&out_dir.join("distance.csv"));
    assert_eq!(rows.len(), 1);
    let lower: f64 = rows[0]["lower"].parse().unwrap();
    let upper: f64 = rows[0]["upper"].parse().unwrap();
    let exact = 0.5f64.atanh();
    assert!(lower <= exact + 1e-9 && exact <= upper + 1e-9, "[{lower}, {upper}]");
    assert!(upper - lower < 1e-5);
    assert_eq!(rows[0]["query_id"], "half");
    assert!(out_dir.join("distance.json").exists());
    assert!(out_dir.join("discs/half.disc.json").exists());
    assert!(out_dir.join("discs/half.dual.json").exists());
}

#[test]
fn certify_ball_example() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "ball.toml", "kind = \"ball\"\ndim = 2\n");
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let f = DiscPoly::new(vec![vec![z, z], vec![one, z]]).unwrap();
    let h = DualElement::polynomial(Divisor::at_origin(2).unwrap(), DiscPoly::constant(&[one, z]));
    let disc = write(dir.path(), "f.json", &serde_json::to_string(&f).unwrap());
    let dual = write(dir.path(), "h.json", &serde_json::to_string(&h).unwrap());
    let out_dir = dir.path().join("out");
    let out = run(bin()
        .args(["certify", "--degree", "4", "--body"])
        .arg(&body)
        .arg("--disc")
        .arg(&disc)
        .arg("--dual")
        .arg(&dual)
        .arg("--out")
        .arg(&out_dir));
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out_dir.join("certify.csv"));
    for key in ["gap", "flatness", "alignment"] {
        let v: f64 = rows[0][key].parse().unwrap();
        assert!(v.abs() < 1e-9, "{key} = {v}");
    }
    assert_eq!(rows[0]["pass"], "true");
}

#[test]
fn malformed_spec_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "bad.toml", "kind = \"ball\"\ndim = \n");
    let queries = write(dir.path(), "q.toml", DISC_QUERIES);
    let out_dir = dir.path().join("out");
    let out = run(bin().arg("distance").arg("--body").arg(&body).arg("--queries").arg(&queries).arg("--out").arg(&out_dir));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // unknown body kind and a bad tolerance are rejected the same way
    let body = write(dir.path(), "odd.toml", "kind = \"cube\"\ndim = 2\n");
    let out = run(bin().arg("metric").arg("--body").arg(&body).arg("--queries").arg(&queries).arg("--out").arg(&out_dir));
    assert_eq!(out.status.code(), Some(1));
    let out = run(bin().args(["metric", "--tol-gap=-1"]).arg("--out").arg(&out_dir));
    assert_eq!(out.status.code(), Some(1));
    let out = run(bin().args(["metric", "--no-such-flag"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
}

#[test]
fn deterministic_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "disc.toml", DISC);
    let queries = write(dir.path(), "q.toml", DISC_QUERIES);
    let mut texts = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = run(bin()
            .args(["metric", "--degree", "8", "--seed", "7", "--deterministic", "--body"])
            .arg(&body)
            .arg("--queries")
            .arg(&queries)
            .arg("--out")
            .arg(&out_dir));
        assert!(out.status.success());
        texts.push((fs::read(out_dir.join("metric.csv")).unwrap(), fs::read(out_dir.join("metric.json")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn environment_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "disc.toml", DISC);
    let queries = write(dir.path(), "q.toml", DISC_QUERIES);
    let out_dir = dir.path().join("env_out");
    let out = run(bin()
        .arg("metric")
        .env("EXTREMAL_DISC_BODY", &body)
        .env("EXTREMAL_DISC_QUERIES", &queries)
        .env("EXTREMAL_DISC_DEGREE", "8")
        .env("EXTREMAL_DISC_OUT", &out_dir));
    assert!(out.status.success());
    let rows = csv_rows(&out_dir.join("metric.csv"));
    let upper: f64 = rows[0]["upper"].parse().unwrap();
    assert!((upper - 1.0).abs() < 1e-5, "{upper}");
    // an explicit flag wins over the environment
    let out = run(bin().args(["metric", "--degree", "1"]).env("EXTREMAL_DISC_DEGREE", "8").env("EXTREMAL_DISC_BODY", &body).env("EXTREMAL_DISC_QUERIES", &queries));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "disc.toml", DISC);
    let queries = write(dir.path(), "q.toml", DISC_QUERIES);
    let out = run(bin().args(["metric", "--degree", "8"]).arg("--body").arg(&body).arg("--queries").arg(&queries));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("query_id,type,lower,upper,gap,iterations,wall_time_s,status\n"), "{text}");
    assert!(text.contains("m0,metric,"));
}
