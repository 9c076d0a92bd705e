//! Error type shared by all estimators and generators.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers (notably the CLI) to map failures
/// onto exit codes: bad arguments, bad data, or a numerical problem inside an
/// estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its legal range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The input data cannot support the requested operation.
    #[error("data error: {0}")]
    Data(String),

    /// tau is so small that the order-statistic index ⌊n(1−τ)⌋ falls outside
    /// the sample.
    #[error("tau = {tau} too small for sample size n = {n}")]
    TauTooSmall { tau: f64, n: usize },

    /// Hill-type estimators need a strictly positive threshold order
    /// statistic for the logarithms to exist.
    #[error("Hill requires positive upper order statistics (threshold Y_(n-k) = {threshold})")]
    NonPositiveThreshold { threshold: f64 },

    #[error("k = {k} outside valid range 1..={max} for n = {n}")]
    KOutOfRange { k: usize, max: usize, n: usize },

    /// The asymmetric least squares iteration ran out of iterations; carries
    /// the last iterate and its normalized first-order-condition residual.
    #[error(
        "expectile iteration did not converge: last iterate {last}, FOC residual {residual:.3e}"
    )]
    NoConvergence { last: f64, residual: f64 },

    /// The expectile/quantile proportionality constant (γ⁻¹−1)^{−γ} needs
    /// 0 < γ < 1.
    #[error("proportionality constant undefined for gamma = {gamma}")]
    ProportionalityUndefined { gamma: f64 },

    /// 1 − (1−α)·γ/(1−γ) landed outside (0,1).
    #[error("gamma too large for composite level: {detail}")]
    CompositeLevel { detail: String },

    #[error("empty tail: threshold {threshold} too high for sample")]
    EmptyTail { threshold: f64 },

    #[error("insufficient tail sample for second-order estimation (k = {k}, need >= {min})")]
    InsufficientTail { k: usize, min: usize },

    #[error("sample too short for block scheme: {m_n} complete blocks, need at least 2")]
    SampleTooShort { m_n: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } => ErrorClass::Usage,
            Error::Data(_)
            | Error::TauTooSmall { .. }
            | Error::KOutOfRange { .. }
            | Error::SampleTooShort { .. } => ErrorClass::Data,
            Error::NonPositiveThreshold { .. }
            | Error::NoConvergence { .. }
            | Error::ProportionalityUndefined { .. }
            | Error::CompositeLevel { .. }
            | Error::EmptyTail { .. }
            | Error::InsufficientTail { .. }
            | Error::Numerical(_) => ErrorClass::Numerical,
        }
    }
}
