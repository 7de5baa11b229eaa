use crate::config::RunConfig;
use crate::report::{safe_id, sci, short, write_file, Table};
use crate::Command;
use extremal_disc::diagnostics::{boundary_profiles, ProfileGrid};
use extremal_disc::dual::{build_stationary, certify};
use extremal_disc::formats::{self, BodySpec, Query, QueryFile, QueryType};
use extremal_disc::metrics::{kobayashi_distance, kobayashi_metric, verify_ck_equality, MetricResult};
use extremal_disc::retraction::check_retraction;
use extremal_disc::table::{closed_form_table, table_csv, TableOptions};
use extremal_disc::{ConvexBody, DiscPoly, DualElement, FlatteningMap};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

/// Summary used for the exit status.
pub struct Outcome {
    pub total: usize,
    pub failed: usize,
    pub all_ok: bool,
}

/// Everything a command produces before anything is written.
struct Report {
    table: Table,
    detail: Value,
    /// Extra JSON files, relative to the output directory.
    files: Vec<(String, Value)>,
    failed: usize,
}

struct Item {
    row: Vec<String>,
    detail: Value,
    files: Vec<(String, Value)>,
    ok: bool,
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, String> {
    let report = match cmd {
        Command::Metric | Command::Distance | Command::CkCheck => batch(cmd, cfg)?,
        Command::Certify => certify_cmd(cfg)?,
        Command::Retract => retract_cmd(cfg)?,
        Command::Table => table_cmd(cfg)?,
        Command::Diagnostics => diagnostics_cmd(cfg)?,
    };
    let total = report.table.rows.len();
    let failed = report.failed;
    emit(cmd, cfg, report)?;
    Ok(Outcome { total, failed, all_ok: failed == 0 })
}

fn emit(cmd: Command, cfg: &RunConfig, report: Report) -> Result<(), String> {
    let csv = report.table.to_csv()?;
    let Some(dir) = &cfg.args.out else {
        print!("{csv}");
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    write_file(&dir.join(format!("{}.csv", cmd.name())), &csv)?;
    let detail = serde_json::to_string_pretty(&report.detail).map_err(|e| e.to_string())?;
    write_file(&dir.join(format!("{}.json", cmd.name())), &(detail + "\n"))?;
    for (name, value) in &report.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
        }
        let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
        write_file(&path, &(text + "\n"))?;
    }
    print!("{}", report.table.to_text());
    Ok(())
}

fn load_body(cfg: &RunConfig) -> Result<ConvexBody, String> {
    let path = cfg.args.body.as_ref().ok_or("--body is required")?;
    let spec = BodySpec::load(path).map_err(|e| e.to_string())?;
    spec.build().map_err(|e| format!("{}: {e}", path.display()))
}

fn load_queries(cfg: &RunConfig, dim: usize, kinds: &[QueryType]) -> Result<Vec<Query>, String> {
    let path = cfg.args.queries.as_ref().ok_or("--queries is required")?;
    let file = QueryFile::load(path).map_err(|e| e.to_string())?;
    let all = file.queries(dim).map_err(|e| format!("{}: {e}", path.display()))?;
    let picked: Vec<Query> = all.into_iter().filter(|q| kinds.contains(&q.kind)).collect();
    if picked.is_empty() {
        let names: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
        return Err(format!("{}: no queries of type {}", path.display(), names.join(" or ")));
    }
    Ok(picked)
}

fn collect(table: &mut Table, items: Vec<Item>) -> (Vec<Value>, Vec<(String, Value)>, usize) {
    let mut details = Vec::new();
    let mut files = Vec::new();
    let mut failed = 0;
    for it in items {
        table.push(it.row);
        details.push(it.detail);
        files.extend(it.files);
        failed += usize::from(!it.ok);
    }
    (details, files, failed)
}

fn wall(cfg: &RunConfig, start: Instant) -> String {
    if cfg.args.deterministic {
        "0".into()
    } else {
        format!("{:.3}", start.elapsed().as_secs_f64())
    }
}

const BATCH_HEADER: [&str; 8] = ["query_id", "type", "lower", "upper", "gap", "iterations", "wall_time_s", "status"];

fn batch(cmd: Command, cfg: &RunConfig) -> Result<Report, String> {
    let body = load_body(cfg)?;
    let kind = match cmd {
        Command::Metric => QueryType::Metric,
        Command::Distance => QueryType::Distance,
        _ => QueryType::CkCheck,
    };
    let queries = load_queries(cfg, body.dim(), &[kind])?;
    let items: Vec<Item> = queries.par_iter().map(|q| batch_item(&body, q, cfg)).collect();
    let mut table = Table::new(&BATCH_HEADER);
    let (details, files, failed) = collect(&mut table, items);
    Ok(Report {
        table,
        detail: json!({ "body": body.kind_name(), "dim": body.dim(), "queries": details }),
        files,
        failed,
    })
}

fn batch_item(body: &ConvexBody, q: &Query, cfg: &RunConfig) -> Item {
    let start = Instant::now();
    let opts = cfg.metric_options(q.tol);
    let failure = |e: String| Item {
        row: vec![
            q.id.clone(),
            q.kind.as_str().into(),
            "nan".into(),
            "nan".into(),
            "nan".into(),
            "0".into(),
            wall(cfg, start),
            format!("error: {e}"),
        ],
        detail: json!({ "id": q.id, "type": q.kind.as_str(), "error": e }),
        files: Vec::new(),
        ok: false,
    };
    if q.kind == QueryType::CkCheck {
        let tol = q.tol.unwrap_or(cfg.args.tol_gap);
        return match verify_ck_equality(body, &q.a, &q.second, &opts, tol) {
            Ok(r) => Item {
                row: vec![
                    q.id.clone(),
                    q.kind.as_str().into(),
                    sci(r.c_lower),
                    sci(r.k_upper),
                    short(r.difference),
                    r.solver_iterations.to_string(),
                    wall(cfg, start),
                    if r.pass { "pass" } else { "fail" }.into(),
                ],
                detail: json!({ "id": q.id, "type": q.kind.as_str(), "tol": tol, "report": r }),
                files: Vec::new(),
                ok: r.pass,
            },
            Err(e) => failure(e.to_string()),
        };
    }
    let result = match q.kind {
        QueryType::Metric => kobayashi_metric(body, &q.a, &q.second, &opts),
        _ => kobayashi_distance(body, &q.a, &q.second, &opts),
    };
    let r = match result {
        Ok(r) => r,
        Err(e) => return failure(e.to_string()),
    };
    let cert_report = r.certificate.as_ref().map(|c| {
        match certify(body, &r.extremal_disc, &c.h, &cfg.certify_tolerances(), c.grid) {
            Ok(rep) => json!(rep),
            Err(e) => json!({ "error": e.to_string() }),
        }
    });
    let status = if r.converged { "ok" } else { "not_converged" };
    Item {
        row: vec![
            q.id.clone(),
            q.kind.as_str().into(),
            sci(r.lower),
            sci(r.upper),
            short(r.upper - r.lower),
            r.solver_iterations.to_string(),
            wall(cfg, start),
            status.into(),
        ],
        files: disc_files(&q.id, &r),
        detail: json!({ "id": q.id, "type": q.kind.as_str(), "result": r, "certificate_report": cert_report }),
        ok: r.converged,
    }
}

fn disc_files(id: &str, r: &MetricResult) -> Vec<(String, Value)> {
    let id = safe_id(id);
    let mut out = vec![(format!("discs/{id}.disc.json"), json!(r.extremal_disc))];
    if let Some(c) = &r.certificate {
        out.push((format!("discs/{id}.dual.json"), json!(c.h)));
    }
    out
}

fn certify_cmd(cfg: &RunConfig) -> Result<Report, String> {
    let body = load_body(cfg)?;
    let disc_path = cfg.args.disc.as_ref().ok_or("--disc is required")?;
    let dual_path = cfg.args.dual.as_ref().ok_or("--dual is required")?;
    let f: DiscPoly = formats::load_disc(disc_path).map_err(|e| e.to_string())?;
    let h: DualElement = formats::load_dual(dual_path).map_err(|e| e.to_string())?;
    if f.dim() != body.dim() || h.dim() != body.dim() {
        return Err(format!("disc and dual element must have dimension {}", body.dim()));
    }
    let grid = cfg.args.grid.unwrap_or(8 * cfg.args.degree.max(f.degree()));
    let mut table = Table::new(&[
        "primal_value",
        "dual_norm",
        "gap",
        "flatness",
        "alignment",
        "quadrature_error",
        "grid",
        "pass",
    ]);
    let rep = certify(&body, &f, &h, &cfg.certify_tolerances(), grid).map_err(|e| e.to_string())?;
    table.push(vec![
        sci(rep.primal_value),
        sci(rep.dual_norm),
        short(rep.gap),
        short(rep.flatness),
        short(rep.alignment),
        short(rep.quadrature_error),
        rep.grid.to_string(),
        rep.pass.to_string(),
    ]);
    Ok(Report { table, failed: usize::from(!rep.pass), detail: json!(rep), files: Vec::new() })
}

fn retract_cmd(cfg: &RunConfig) -> Result<Report, String> {
    let body = load_body(cfg)?;
    let queries = load_queries(cfg, body.dim(), &[QueryType::Metric, QueryType::CkCheck])?;
    let items: Vec<Item> = queries.par_iter().map(|q| retract_item(&body, q, cfg)).collect();
    let mut table = Table::new(&[
        "query_id",
        "constancy_residual",
        "bezout_residual",
        "idempotence",
        "disc_identity",
        "left_inverse",
        "winding_failures",
        "sign_min",
        "status",
    ]);
    let (details, files, failed) = collect(&mut table, items);
    Ok(Report { table, detail: json!({ "body": body.kind_name(), "queries": details }), files, failed })
}

fn retract_item(body: &ConvexBody, q: &Query, cfg: &RunConfig) -> Item {
    let built = kobayashi_metric(body, &q.a, &q.second, &cfg.metric_options(q.tol)).and_then(|r| {
        let cert = r.certificate.as_ref().ok_or(extremal_disc::Error::DegenerateData)?;
        let pair = build_stationary(&r.extremal_disc, &cert.h, 1e-4)?;
        FlatteningMap::new(pair)
    });
    let map = match built {
        Ok(m) => m,
        Err(e) => {
            let mut row = vec![q.id.clone()];
            row.extend(std::iter::repeat_n("nan".to_string(), 7));
            row.push(format!("error: {e}"));
            return Item {
                row,
                detail: json!({ "id": q.id, "error": e.to_string() }),
                files: Vec::new(),
                ok: false,
            };
        }
    };
    let chk = check_retraction(body, &map, cfg.args.samples, cfg.args.seed);
    let ok = chk.pass(1e-9);
    let bezout = map.bezout().map_or(0.0, |b| b.residual);
    Item {
        row: vec![
            q.id.clone(),
            short(map.pair().constancy_residual),
            short(bezout),
            short(chk.idempotence),
            short(chk.disc_identity),
            short(chk.left_inverse),
            chk.winding_failures.to_string(),
            short(chk.sign_min),
            if ok { "pass" } else { "fail" }.into(),
        ],
        detail: json!({ "id": q.id, "check": chk, "bezout_residual": bezout }),
        files: Vec::new(),
        ok,
    }
}

fn table_cmd(cfg: &RunConfig) -> Result<Report, String> {
    let opts = TableOptions { metric: cfg.metric_options(None), seed: cfg.args.seed, ..TableOptions::default() };
    let rows = closed_form_table(&opts).map_err(|e| e.to_string())?;
    let mut table = Table::new(&["body", "query", "analytic", "computed_lower", "computed_upper", "gap", "pass"]);
    // one formatter for the library CSV and this table
    let csv = table_csv(&rows).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        table.push(rec.iter().map(str::to_string).collect());
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    Ok(Report { table, detail: json!(rows), files: Vec::new(), failed })
}

fn diagnostics_cmd(cfg: &RunConfig) -> Result<Report, String> {
    let body = load_body(cfg)?;
    let mut table =
        Table::new(&["query_id", "body", "smooth", "max_profile1", "min_profile1", "max_profile2", "skipped"]);
    let grid = ProfileGrid::default();
    let discs: Vec<(String, Result<DiscPoly, String>)> = match &cfg.args.disc {
        Some(path) => vec![(
            safe_id(&path.file_stem().unwrap_or_default().to_string_lossy()),
            Ok(load_disc(path)?),
        )],
        None => {
            let queries = load_queries(cfg, body.dim(), &[QueryType::Metric, QueryType::CkCheck])?;
            queries
                .par_iter()
                .map(|q| {
                    let r = kobayashi_metric(&body, &q.a, &q.second, &cfg.metric_options(q.tol));
                    (q.id.clone(), r.map(|r| r.extremal_disc).map_err(|e| e.to_string()))
                })
                .collect()
        }
    };
    let mut details = Vec::new();
    let mut failed = 0;
    for (id, disc) in discs {
        match disc.and_then(|f| boundary_profiles(&body, &f, &grid).map_err(|e| e.to_string())) {
            Ok(rep) => {
                table.push(vec![
                    id.clone(),
                    rep.body.clone(),
                    rep.smooth.to_string(),
                    short(rep.max_profile1),
                    short(rep.min_profile1),
                    short(rep.max_profile2),
                    rep.skipped.to_string(),
                ]);
                details.push(json!({ "id": id, "profiles": rep }));
            }
            Err(e) => {
                failed += 1;
                table.push(vec![
                    id.clone(),
                    body.kind_name().into(),
                    body.is_smooth().to_string(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "0".into(),
                ]);
                details.push(json!({ "id": id, "error": e }));
            }
        }
    }
    Ok(Report { table, detail: json!(details), files: Vec::new(), failed })
}

fn load_disc(path: &Path) -> Result<DiscPoly, String> {
    formats::load_disc(path).map_err(|e| e.to_string())
}
