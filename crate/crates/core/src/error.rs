use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(#[from] DomainError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation on an empty point set")]
    EmptySet,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exactness condition fails: max |dP/ds - dQ/dt| = {residual:e} at {at:?}")]
    NotExact { residual: f64, at: Vec<f64> },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{source} (at {at:?})")]
    At { source: Box<Error>, at: Vec<f64> },
}

impl Error {
    /// True for errors caused by the numbers themselves rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Domain(_) => true,
            Error::At { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Attaches the evaluation point to an error.
    pub fn at(self, point: &[f64]) -> Error {
        match self {
            Error::At { .. } => self,
            e => Error::At {
                source: Box::new(e),
                at: point.to_vec(),
            },
        }
    }
}

/// Failures raised while evaluating an expression or integrand at a concrete point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("power of negative base {base} with non-integer exponent {exponent}")]
    NegativeBase { base: f64, exponent: f64 },
    #[error("non-finite value {value} at {at:?}")]
    NonFinite { value: f64, at: Vec<f64> },
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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
