use thiserror::Error;

/// Errors surfaced by samplers, measure functionals and rate-function solvers.
///
/// Numeric non-convergence is deliberately *not* an error: evaluators return
/// extended reals (`f64::INFINITY` is a value) together with `converged`
/// flags, so infima and suprema compose. Only structural problems (shape
/// mismatches, degenerate inputs, unsupported requests) become `Err`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge (partial value {partial}, error estimate {error})")]
    QuadratureNonConvergence { partial: f64, error: f64 },

    #[error("exponential tilting is not supported for family {0}")]
    TiltUnsupported(String),

    #[error("validation: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
