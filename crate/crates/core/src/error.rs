use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    BadDimension(usize),
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: max |m - m^dag| = {violation:.3e} exceeds {tol:.3e}")]
    NotHermitian { violation: f64, tol: f64 },
    #[error("trace {trace:.12} differs from 1 by more than {tol:.3e}")]
    TraceNotOne { trace: f64, tol: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below -{tol:.3e}")]
    NotPositive { min_eigenvalue: f64, tol: f64 },
    #[error("deviation part has vanishing norm {norm:.3e}")]
    ZeroDeviation { norm: f64 },
    #[error("purity parameter {0} outside [0, 1]")]
    PurityOutOfRange(f64),
    #[error("Bell-diagonal coefficients give eigenvalue lambda_{index} = {value:.6e} outside [0, 1]")]
    InvalidBdVector { index: usize, value: f64 },
    #[error("pulse at t = {pulse_time} s exceeds total evolution time {total_time} s")]
    ScheduleOverrun { pulse_time: f64, total_time: f64 },
    #[error("fit failed to converge: best residual {residual:.3e} exceeds 10x noise floor {noise_floor:.3e}")]
    FitDivergence { residual: f64, noise_floor: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::FitDivergence { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
