use thiserror::Error;

use crate::copula::FixedPointReport;

/// Errors produced anywhere in the copula pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e}, max {max_eigenvalue:.3e})")]
    NotPositiveDefinite {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("trace must be 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero matrix has no projective ray")]
    ZeroMatrix,

    #[error("random sample stayed rank deficient after {attempts} attempts")]
    DegenerateSample { attempts: usize },

    #[error("transform is numerically singular (condition number {condition:.3e})")]
    SingularTransform { condition: f64 },

    #[error("infinite projective distance: map is not strictly positive on the sampled states")]
    InfiniteDistance,

    #[error("fixed-point iteration did not converge after {} iterations (last step {:.3e})", .report.iterations, .report.final_step)]
    NotConverged { report: Box<FixedPointReport> },

    #[error("singular intermediate in fixed-point map (eigenvalue ratio {ratio:.3e}); consider regularization")]
    SingularIntermediate { ratio: f64 },

    #[error("scaling equations violated (residuals {first:.3e}, {second:.3e})")]
    VerificationFailed { first: f64, second: f64 },

    #[error(
        "state is rank deficient (min eigenvalue {min_eigenvalue:.3e}); enable regularization"
    )]
    RankDeficient { min_eigenvalue: f64 },

    #[error("computed state failed the uniform-marginal check (residual {residual:.3e})")]
    PrecopulaCheckFailed { residual: f64 },

    #[error("state does not have uniform marginals (residual {residual:.3e})")]
    NotPrecopula { residual: f64 },

    #[error("matrix entry ({row}, {col}) is not strictly positive: {value}")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("Sinkhorn scaling did not converge after {iterations} iterations (deviation {deviation:.3e})")]
    SinkhornNotConverged { iterations: usize, deviation: f64 },

    #[error("malformed document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
