use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the range where the estimate or scheme is defined.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The gradient-estimate constant must be strictly positive.
    #[error(
        "C = {c} is not admissible: with C <= 0 the gradient estimate yields no Harnack \
         inequality (the Benilan-Crandall inequality for the subcritical p-diffusion \
         equation has this form, and Harnack inequalities fail there)"
    )]
    NonPositiveConstant { c: f64 },

    /// Two times were supplied out of order.
    #[error("times must satisfy t1 < t2, got t1 = {t1}, t2 = {t2}")]
    TimeOrdering { t1: f64, t2: f64 },

    /// A value is outside the domain of a formula (e.g. a negative density).
    #[error("domain error: {0}")]
    Domain(String),

    /// Porous medium exponent at or below the critical value.
    #[error("porous medium exponent M = {m} must exceed M0({d}) = {m0}")]
    BelowCriticalExponent { m: f64, d: usize, m0: f64 },

    /// p-diffusion exponent inside the subcritical range 1 < p <= 2d/(d+1).
    #[error(
        "p = {p} lies in the subcritical range p <= 2d/(d+1) = {threshold} for d = {d}; \
         no Harnack inequality of this form holds there"
    )]
    SubcriticalExponent { p: f64, d: usize, threshold: f64 },

    /// The two directions of the gradient estimate were mixed up.
    #[error("estimate direction mismatch: {0}")]
    Direction(String),

    /// Inputs of incompatible shapes (knots, dimensions, grids).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Solver or sampler configuration is invalid.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A region of a grid contains no (or too few) nodes.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// Operation requested for a solution type that does not provide it.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative computation did not reach its target.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// A certificate that must hold by construction failed.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
