use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("matrix is singular (zero pivot at column {0})")]
    Singular(usize),

    #[error("ILU pivot breakdown in row {0}")]
    PivotBreakdown(usize),

    #[error("tuned preconditioner is singular: |y^H P^-1 t| = {0:e}")]
    TuningSingular(f64),

    #[error("spectrum interval [{a}, {b}] straddles the origin; polynomial preconditioner inapplicable")]
    StraddlesOrigin { a: f64, b: f64 },

    #[error("interval [{a}, {b}] is not on one side of the origin; apply interval_guard first")]
    IntervalNotGuarded { a: f64, b: f64 },

    #[error("Gram matrix is numerically singular for degree {0}; use a smaller degree")]
    DegreeTooHigh(usize),

    #[error("invalid eigen-basis: {0}")]
    InvalidBasis(String),

    #[error("shift coincides with an eigenvalue (lambda_1 = 0)")]
    ShiftIsEigenvalue,

    #[error("the disk envelope is invalid (C = {0} <= 1)")]
    InvalidEnvelope(f64),

    #[error("rank collapse in iterate block at column {0}")]
    RankCollapse(usize),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("QR iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
