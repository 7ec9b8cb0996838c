use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: symmetry residual {residual:e} exceeds {limit:e}")]
    NotHermitian { residual: f64, limit: f64 },

    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("value {value} lies outside the domain {domain}")]
    DomainViolation { value: f64, domain: String },

    #[error("{what} is undefined at t = {at}")]
    Singular { what: String, at: f64 },

    #[error("derivative order {order} is not supported for {kind} (max {max})")]
    UnsupportedOrder { kind: String, order: usize, max: usize },

    #[error("node multiplicity {multiplicity} exceeds the supported coincidence order {max}")]
    CoincidenceOrder { multiplicity: usize, max: usize },

    #[error("no closed-form antiderivative for {0}")]
    NoAntiderivative(String),

    #[error("unsupported interval transfer from {source_interval} to {target}")]
    UnsupportedTransfer { source_interval: String, target: String },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("parse error at position {position}: expected {expected}, found {found}")]
    Parse {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("invalid function specification: {0}")]
    InvalidFunction(String),

    #[error("function value {value} at {at} is not positive")]
    NonPositiveValue { at: f64, value: f64 },

    #[error("route {route} does not support order {order}")]
    RouteOrderMismatch { route: String, order: usize },

    #[error("sampler exhausted after {attempts} rejections")]
    SamplerExhausted { attempts: usize },

    #[error("bisection did not bracket: {0}")]
    NonBracketing(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("report schema mismatch: expected {expected}, found {found}")]
    Schema { expected: String, found: String },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
