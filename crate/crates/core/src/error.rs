use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Each variant names the stage or input that failed so front-ends can map
/// it to an exit code and a useful message.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypspecError {
    #[error("lambda0 is not positive: value {value} at zeta = {zeta}")]
    NonPositiveSpeed { zeta: f64, value: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("grid for {what} must be strictly increasing from 0 to 1")]
    NonIncreasingGrid { what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("similarity: integrator step size underflow at zeta = {zeta} (h = {step:e})")]
    IntegratorFailure { zeta: f64, step: f64 },

    #[error("spectrum: K is singular (reciprocal condition number {rcond:e})")]
    SingularK { rcond: f64 },

    #[error("spectrum: eigendecomposition failed: {0}")]
    EigDecompFailure(String),

    #[error("spectrum: eigenvalue rho_{k} is zero, log|rho| undefined")]
    ZeroEigenvalue { k: usize },

    #[error("mode index out of range: {0}")]
    ModeIndexOutOfRange(String),

    #[error("eigenfunctions: eigenvalue rho_{k} has no eigenvector chain {chain}")]
    NoEigenvector { k: usize, chain: usize },

    #[error("eigenfunctions: chain basis expansion failed: {0}")]
    DefectiveChain(String),

    #[error("eigenfunctions: order j = {j} outside chain of length {p}")]
    IndexOutOfChain { j: usize, p: usize },

    #[error("boundary matrix A_d is not diagonalizable")]
    NotDiagonalizable,

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
}

impl HypspecError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        HypspecError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        HypspecError::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    /// True for failures of a numerical stage rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HypspecError::IntegratorFailure { .. }
                | HypspecError::EigDecompFailure(_)
                | HypspecError::DefectiveChain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, HypspecError>;
