//! Extremal holomorphic discs in bounded convex domains of `C^n`.
//!
//! The crate computes Kobayashi metric and distance values by solving the
//! discretized extremal problem for polynomial discs, certifies each value
//! with an independently solved dual problem, and builds the holomorphic
//! retraction attached to a stationary disc.
//!
//! Module map:
//! - [`gauge`]: Minkowski gauge, dual gauge and supporting functionals.
//! - [`disc`]: divisors, jets and the affine space of polynomial discs.
//! - [`primal`]: the primal min-max problem over the boundary grid.
//! - [`dual`]: dual elements, residue pairing, certificates, multipliers.
//! - [`metrics`]: Kobayashi metric/distance and Carathéodory lower bounds.
//! - [`retraction`]: Bézout pair, flattening map and the retraction.

pub mod diagnostics;
pub mod disc;
pub mod dual;
pub mod error;
pub mod formats;
pub mod gauge;
pub mod metrics;
pub mod poly;
pub mod primal;
pub mod retraction;
pub mod sampling;
pub mod table;

mod conic;
mod cutting_plane;
mod linalg;

pub use num_complex::Complex64 as C;

pub use error::{Error, Result};
pub use gauge::{BodyKind, ConvexBody, GaugeOracle, SupportFunctional};
pub use poly::Poly;
pub use disc::{DiscPoly, Divisor, JetData};
pub use dual::{CertificateReport, DualCertificate, DualElement, StationaryPair};
pub use metrics::{MetricOptions, MetricResult};
pub use primal::{PrimalOptions, PrimalSolution, SolverBackend};
pub use retraction::{BezoutPair, FlatteningMap};

/// Bilinear pairing `z . w = sum z_j w_j` (no conjugation).
pub fn pairing(z: &[C], w: &[C]) -> C {
    z.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm(z: &[C]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn all_finite(z: &[C]) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Equispaced grid `exp(2 pi i k / m)`, `k = 0..m`, on the unit circle.
pub fn unit_grid(m: usize) -> Vec<C> {
    (0..m)
        .map(|i| C::from_polar(1.0, std::f64::consts::TAU * i as f64 / m as f64))
        .collect()
}
