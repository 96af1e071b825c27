use thiserror::Error;

/// Errors raised by the numerical routines and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometry violated: {0}")]
    Geometry(String),

    #[error("grid too coarse: spacing {spacing:.3e} exceeds limit {limit:.3e} (magnetic length {magnetic_length:.3e})")]
    Resolution {
        spacing: f64,
        limit: f64,
        magnetic_length: f64,
    },

    #[error("quadrature on [{a}, {b}] did not converge: estimated error {achieved:.3e} > tolerance {requested:.3e}")]
    Quadrature {
        a: f64,
        b: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (last max residual {last:.3e})")]
    NoConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate well: {0}")]
    DegenerateWell(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
