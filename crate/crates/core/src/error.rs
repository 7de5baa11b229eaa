use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("jet data does not match the divisor: {0}")]
    JetMismatch(String),

    #[error("the zero vector has no supporting functional")]
    ZeroVector,

    #[error("point lies outside the closed body (gauge {gauge})")]
    OutsideBody { gauge: f64 },

    #[error("grid too coarse: need at least {required} points, got {got}")]
    GridTooSmall { required: usize, got: usize },

    #[error("Hermite interpolation is ill-conditioned (jet residual {residual:.3e})")]
    IllConditioned { residual: f64 },

    #[error("divisor degree {degree} exceeds disc degree + 1 = {limit}")]
    InfeasibleJets { degree: usize, limit: usize },

    #[error("divisor node too close to the unit circle (|zeta| = {modulus})")]
    NodeNearBoundary { modulus: f64 },

    #[error("dual gauge evaluation did not converge (residual {residual:.3e})")]
    DualGaugeConvergence { residual: f64 },

    #[error("numerical solver failure: {0}")]
    Solver(String),

    #[error("jet data is annihilated by every dual element; the normalization is infeasible")]
    DegenerateData,

    #[error("pair is not stationary: f'.f~ deviates from a constant by {deviation:.3e}")]
    NonStationary { deviation: f64 },

    #[error("interior pole of zeta*h survives at a nonzero node (remainder {remainder:.3e})")]
    SurvivingPole { remainder: f64 },

    #[error("multiplier is not positive on the unit circle (min {min:.3e})")]
    PositivityViolation { min: f64 },

    #[error("no Bezout pair found (best identity residual {residual:.3e})")]
    BezoutFailure { residual: f64 },

    #[error("winding number of det S is {winding}, expected 1")]
    WindingNumber { winding: i64 },

    #[error("flattening map round trip failed (residual {residual:.3e})")]
    RoundTrip { residual: f64 },

    #[error("point is outside the domain (gauge {gauge})")]
    OutsideDomain { gauge: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
