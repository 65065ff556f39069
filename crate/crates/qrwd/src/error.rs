use thiserror::Error;

/// Every failure the library reports to callers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QrwdError {
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction failed: {0}")]
    Constructive(String),
    #[error("orientation violation at {re}+{im}i (|mu| = {mu_abs})")]
    Orientation { re: f64, im: f64, mu_abs: f64 },
    #[error("beltrami coefficient too large: |mu| = {0} >= 0.95")]
    DilatationTooLarge(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for QrwdError {
    fn from(e: std::io::Error) -> Self {
        QrwdError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QrwdError>;
