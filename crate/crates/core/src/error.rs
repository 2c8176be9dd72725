use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not normalizable by linearization: {0}")]
    NotNormalizable(String),

    #[error("Orlicz function is not normalized: normalization integral = {0}")]
    NotNormalized(f64),

    #[error("density formula negative at x = {x} (value {value}): hypotheses of the generating construction violated")]
    NegativeDensity { x: f64, value: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("limit does not exist numerically: {0}")]
    LimitNotFound(String),

    #[error("quadrature on [{a}, {b}] did not converge: value {value}, error estimate {error}")]
    Quadrature { a: f64, b: f64, value: f64, error: f64 },

    #[error("not 2-concave: third derivative {value} > 0 at t = {t}")]
    NotTwoConcave { t: f64, value: f64 },

    #[error("random variable is not integrable: {0}")]
    NotIntegrable(String),

    #[error("distribution has atoms; a continuous density is required")]
    HasAtoms,

    #[error("functions are not equivalent on the grid: {0}")]
    NotEquivalent(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
