use clap::Args as ClapArgs;
use extremal_disc::dual::CertifyTolerances;
use extremal_disc::{MetricOptions, SolverBackend};
use std::path::PathBuf;

/// Flags shared by all subcommands; each can also be set through an
/// `EXTREMAL_DISC_*` environment variable.
#[derive(ClapArgs, Debug, Clone)]
pub struct Args {
    /// Body spec (TOML, or JSON by extension).
    #[arg(long, global = true, env = "EXTREMAL_DISC_BODY")]
    pub body: Option<PathBuf>,
    /// Query batch (TOML, or JSON by extension).
    #[arg(long, global = true, env = "EXTREMAL_DISC_QUERIES")]
    pub queries: Option<PathBuf>,
    /// Disc degree N.
    #[arg(long, global = true, env = "EXTREMAL_DISC_DEGREE", default_value_t = 32)]
    pub degree: usize,
    /// Boundary grid size M (default 8N).
    #[arg(long, global = true, env = "EXTREMAL_DISC_GRID")]
    pub grid: Option<usize>,
    #[arg(long, global = true, env = "EXTREMAL_DISC_TOL_PRIMAL", default_value_t = 1e-6)]
    pub tol_primal: f64,
    /// Duality gap tolerance; also the default `ck_check` tolerance.
    #[arg(long, global = true, env = "EXTREMAL_DISC_TOL_GAP", default_value_t = 1e-4)]
    pub tol_gap: f64,
    #[arg(long, global = true, env = "EXTREMAL_DISC_TOL_FLAT", default_value_t = 1e-4)]
    pub tol_flat: f64,
    #[arg(long, global = true, env = "EXTREMAL_DISC_TOL_ALIGN", default_value_t = 1e-4)]
    pub tol_align: f64,
    /// Root-search target `|m - 1|`.
    #[arg(long, global = true, env = "EXTREMAL_DISC_TOL_M", default_value_t = 1e-4)]
    pub tol_m: f64,
    /// Output directory; without it the CSV report goes to stdout.
    #[arg(long, global = true, env = "EXTREMAL_DISC_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "EXTREMAL_DISC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write 0 for wall times so reports are byte-reproducible.
    #[arg(long, global = true, env = "EXTREMAL_DISC_DETERMINISTIC")]
    pub deterministic: bool,
    /// Disc file for `certify` and `diagnostics`.
    #[arg(long, global = true, env = "EXTREMAL_DISC_DISC")]
    pub disc: Option<PathBuf>,
    /// Dual element file for `certify`.
    #[arg(long, global = true, env = "EXTREMAL_DISC_DUAL")]
    pub dual: Option<PathBuf>,
    /// Sample count for `retract` checks.
    #[arg(long, global = true, env = "EXTREMAL_DISC_SAMPLES", default_value_t = 100)]
    pub samples: usize,
    /// Optimization backend.
    #[arg(long, global = true, env = "EXTREMAL_DISC_BACKEND", value_parser = parse_backend, default_value = "auto")]
    pub backend: SolverBackend,
}

fn parse_backend(s: &str) -> Result<SolverBackend, String> {
    match s {
        "auto" => Ok(SolverBackend::Auto),
        "conic" => Ok(SolverBackend::Conic),
        "cutting-plane" => Ok(SolverBackend::CuttingPlane),
        other => Err(format!("unknown backend `{other}` (auto, conic, cutting-plane)")),
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub args: Args,
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, String> {
        let tols = [
            ("tol-primal", args.tol_primal),
            ("tol-gap", args.tol_gap),
            ("tol-flat", args.tol_flat),
            ("tol-align", args.tol_align),
            ("tol-m", args.tol_m),
        ];
        for (name, t) in tols {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--{name} must be positive, got {t}"));
            }
        }
        // every built-in query uses a divisor of degree 2
        if args.degree < 2 {
            return Err(format!("--degree must be at least 2, got {}", args.degree));
        }
        if let Some(m) = args.grid {
            if m < 8 * args.degree {
                return Err(format!("--grid must be at least 8N = {}, got {m}", 8 * args.degree));
            }
        }
        Ok(RunConfig { args })
    }

    pub fn metric_options(&self, tol_m: Option<f64>) -> MetricOptions {
        MetricOptions {
            degree: self.args.degree,
            grid: self.args.grid,
            tol_primal: self.args.tol_primal,
            tol_m: tol_m.unwrap_or(self.args.tol_m),
            backend: self.args.backend,
            ..MetricOptions::default()
        }
    }

    pub fn certify_tolerances(&self) -> CertifyTolerances {
        CertifyTolerances {
            gap: self.args.tol_gap,
            flatness: self.args.tol_flat,
            alignment: self.args.tol_align,
            grid: self.args.grid,
        }
    }
}
