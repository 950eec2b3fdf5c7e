use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rotation number {p}/{q}: {reason}")]
    InvalidRotation { p: i64, q: i64, reason: &'static str },

    #[error("coefficients are not Hermitian (asymmetry {asymmetry:e} at harmonic {harmonic})")]
    NonHermitian { harmonic: i64, asymmetry: f64 },

    #[error("difference equation is incompatible: resonant harmonic {harmonic} has magnitude {magnitude:e}")]
    ResonantRhs { harmonic: i64, magnitude: f64 },

    #[error("prescribed average has non-resonant harmonic {harmonic}")]
    NonResonantAverage { harmonic: i64 },

    #[error("{what} has nonzero mean {mean:e}")]
    NonzeroMean { what: &'static str, mean: f64 },

    #[error("harmonic {l} is outside the domain: {reason}")]
    OutOfDomain { l: i64, reason: &'static str },

    #[error("order-1 coefficient is resonant: harmonic {harmonic} has magnitude {magnitude:e}")]
    ResonantFirstOrder { harmonic: i64, magnitude: f64 },

    #[error("order {needed} requested but only orders below {available} are available")]
    MissingOrder { needed: usize, available: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("h_{k} has degree {degree} > {bound}")]
    DegreeMismatch { k: usize, degree: usize, bound: usize },

    #[error("degree {degree} exceeds the hard cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("table is not strictly convex at epsilon = {epsilon}: min(h) = {min_h:e}, min(h + h'') = {min_curvature:e}")]
    NotConvex { epsilon: f64, min_h: f64, min_curvature: f64 },

    #[error("line (phi = {phi}, lambda = {lambda}) does not cross the table")]
    LineMissesTable { phi: f64, lambda: f64 },

    #[error("root solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("caustic reconstruction is not a graph: phi is not increasing near t = {t}")]
    NotAGraph { t: f64 },

    #[error("scaling fit: {0}")]
    Fit(&'static str),

    #[error("invalid deformation: {0}")]
    Deformation(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
