use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped so that callers (the CLI in particular) can map them
/// to coarse classes: invariant/domain violations, data problems, and
/// numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric within tolerance (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("generator is not anti-Hurwitz (smallest spectral real part {0:.3e})")]
    NotAntiHurwitz(f64),

    #[error("monotonicity LMI violated: smallest eigenvalue of P*G + G'*P is {0:.3e}")]
    MonotonicityViolated(f64),

    #[error("operation is undefined at the origin")]
    ZeroVector,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("dataset is empty")]
    EmptyData,

    #[error("evaluation at the origin requires a positive degree (nu = {0})")]
    OriginWithNonPositiveDegree(f64),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("sampler exhausted after {attempts} draws ({accepted} admissible, {requested} requested)")]
    SamplerExhausted {
        attempts: usize,
        accepted: usize,
        requested: usize,
    },

    #[error("quadrature box must exclude the origin")]
    OriginInsideBox,

    #[error("offset vector must have no zero component")]
    ZeroOffsetComponent,

    #[error("difference quotient undefined: coordinate {index} of x and x* coincide")]
    CoincidentCoordinate { index: usize },

    #[error("model is already homogeneous")]
    AlreadyHomogeneous,

    #[error("model is not of the expected kind: {0}")]
    WrongModelKind(String),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
