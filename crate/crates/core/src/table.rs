//! Closed-form comparison suite on the disc, the ball and the polydisc.

use crate::error::{Error, Result};
use crate::gauge::ConvexBody;
use crate::metrics::{kobayashi_distance, kobayashi_metric, poincare_distance, MetricOptions};
use crate::{norm, sampling, C};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub body: String,
    pub query: String,
    pub analytic: f64,
    pub computed_lower: f64,
    pub computed_upper: f64,
    pub gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    pub metric: MetricOptions,
    pub seed: u64,
    /// Random cases per body and query type.
    pub cases: usize,
    /// Allowed distance of the analytic value from the computed bracket.
    pub tol: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { metric: MetricOptions::default(), seed: 7, cases: 2, tol: 1e-4 }
    }
}

enum Case {
    Metric { a: Vec<C>, v: Vec<C> },
    Distance { a: Vec<C>, b: Vec<C> },
}

struct Job {
    body: ConvexBody,
    case: Case,
    analytic: f64,
}

fn fmt_vec(z: &[C]) -> String {
    let parts: Vec<String> = z.iter().map(|c| format!("{:.4}{:+.4}i", c.re, c.im)).collect();
    format!("({})", parts.join(" "))
}

fn jobs(opts: &TableOptions) -> Result<Vec<Job>> {
    let mut rng = sampling::rng(opts.seed);
    let zero2 = vec![C::new(0.0, 0.0); 2];
    let mut out = Vec::new();
    let disc = ConvexBody::unit_disc();
    let ball = ConvexBody::ball(2)?;
    let poly = ConvexBody::polydisc(vec![1.0, 1.0])?;
    let e1 = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
    out.push(Job {
        body: disc.clone(),
        analytic: 0.5f64.atanh(),
        case: Case::Distance { a: vec![C::new(0.0, 0.0)], b: vec![C::new(0.5, 0.0)] },
    });
    out.push(Job { body: ball.clone(), analytic: 1.0, case: Case::Metric { a: zero2.clone(), v: e1.clone() } });
    out.push(Job { body: poly.clone(), analytic: 1.0, case: Case::Metric { a: zero2.clone(), v: e1 } });
    for _ in 0..opts.cases {
        let a = sampling::in_disc(&mut rng, 0.6);
        let v = sampling::in_disc(&mut rng, 1.0);
        out.push(Job {
            body: disc.clone(),
            analytic: v.norm() / (1.0 - a.norm_sqr()),
            case: Case::Metric { a: vec![a], v: vec![v] },
        });
        let b = sampling::in_disc(&mut rng, 0.9);
        out.push(Job {
            body: disc.clone(),
            analytic: poincare_distance(a, b)?,
            case: Case::Distance { a: vec![a], b: vec![b] },
        });

        let v = sampling::on_sphere(&mut rng, 2);
        let scale = rng.random_range(0.5..2.0);
        let v: Vec<C> = v.iter().map(|c| c * scale).collect();
        out.push(Job { body: ball.clone(), analytic: norm(&v), case: Case::Metric { a: zero2.clone(), v: v.clone() } });
        let r = rng.random_range(0.1..0.8);
        let u = sampling::on_sphere(&mut rng, 2);
        let b: Vec<C> = u.iter().map(|c| c * r).collect();
        out.push(Job { body: ball.clone(), analytic: r.atanh(), case: Case::Distance { a: zero2.clone(), b } });

        out.push(Job {
            body: poly.clone(),
            analytic: v.iter().map(|c| c.norm()).fold(0.0, f64::max),
            case: Case::Metric { a: zero2.clone(), v },
        });
        let b = vec![sampling::in_disc(&mut rng, 0.8), sampling::in_disc(&mut rng, 0.8)];
        let rb = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
        out.push(Job { body: poly.clone(), analytic: rb.atanh(), case: Case::Distance { a: zero2.clone(), b } });
    }
    Ok(out)
}

/// Runs the suite; rows come back in a fixed order independent of timing.
pub fn closed_form_table(opts: &TableOptions) -> Result<Vec<TableRow>> {
    let jobs = jobs(opts)?;
    let results: Vec<Result<TableRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|job| s.spawn(|| run(job, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Solver("worker panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}

fn run(job: &Job, opts: &TableOptions) -> Result<TableRow> {
    let (query, r) = match &job.case {
        Case::Metric { a, v } => {
            (format!("metric a={} v={}", fmt_vec(a), fmt_vec(v)), kobayashi_metric(&job.body, a, v, &opts.metric)?)
        }
        Case::Distance { a, b } => {
            (format!("distance a={} b={}", fmt_vec(a), fmt_vec(b)), kobayashi_distance(&job.body, a, b, &opts.metric)?)
        }
    };
    let tol = opts.tol * job.analytic.max(1.0);
    Ok(TableRow {
        body: format!("{}({})", job.body.kind_name(), job.body.dim()),
        query,
        analytic: job.analytic,
        computed_lower: r.lower,
        computed_upper: r.upper,
        gap: r.upper - r.lower,
        pass: r.lower - tol <= job.analytic && job.analytic <= r.upper + tol && r.upper - r.lower <= tol,
    })
}

/// CSV with columns `body, query, analytic, computed_lower, computed_upper, gap, pass`.
pub fn table_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["body", "query", "analytic", "computed_lower", "computed_upper", "gap", "pass"])
        .map_err(|e| Error::Parse(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.body.clone(),
            r.query.clone(),
            format!("{:.10e}", r.analytic),
            format!("{:.10e}", r.computed_lower),
            format!("{:.10e}", r.computed_upper),
            format!("{:.3e}", r.gap),
            r.pass.to_string(),
        ])
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
