use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Each variant belongs to one of four classes (parse, invalid matrix,
/// invalid configuration, numeric failure); see [`Error::class`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("matrix is not square: {rows} rows, row {row} has {columns} columns")]
    NotSquare {
        rows: usize,
        row: usize,
        columns: usize,
    },

    #[error("matrix asymmetry {asymmetry:.3e} exceeds relative tolerance {tolerance:.3e}")]
    AsymmetryTooLarge { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e} < -{tolerance:.3e}")]
    NotPsd {
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("matrix is not positive definite: pivot {index} is {pivot:.6e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("invalid training plan: t_tau = {t_tau} with block length {block_length} ({reason})")]
    InvalidPlan {
        t_tau: i64,
        block_length: u64,
        reason: &'static str,
    },

    #[error("invalid link budget: {0}")]
    InvalidBudget(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    ConvergenceFailure { iterations: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Coarse error classes shared by the CLI exit codes and the C ABI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    InvalidMatrix,
    InvalidConfig,
    Numeric,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::InvalidMatrix => 3,
            ErrorClass::InvalidConfig => 4,
            ErrorClass::Numeric => 5,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Io { .. } => ErrorClass::Parse,
            Error::NotSquare { .. }
            | Error::AsymmetryTooLarge { .. }
            | Error::NotPsd { .. }
            | Error::EmptyMatrix => ErrorClass::InvalidMatrix,
            Error::InvalidPlan { .. }
            | Error::InvalidBudget(_)
            | Error::InvalidConfig(_)
            | Error::DimensionMismatch { .. } => ErrorClass::InvalidConfig,
            Error::NotPositiveDefinite { .. }
            | Error::ConvergenceFailure { .. }
            | Error::NonFinite(_) => ErrorClass::Numeric,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}
