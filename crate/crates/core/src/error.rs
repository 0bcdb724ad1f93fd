use thiserror::Error;

/// Errors raised across the symbolic engine and the numerical oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("polynomial is not in the symmetrized domain of ({x}, {y}): {reason}")]
    NotInSymDomain { x: String, y: String, reason: String },

    #[error("hyperoperator needs {required} slot(s) but {given} operand(s) were supplied")]
    ArityMismatch { required: usize, given: usize },

    #[error("slot derivation used without a base operator")]
    MissingBase,

    #[error("degree {degree} exceeds truncation degree {truncation}")]
    TruncationExceeded { degree: usize, truncation: usize },

    #[error("symbol `{0}` has no matrix assigned")]
    UnassignedSymbol(String),

    #[error("spectrum outside the domain of {function}: {detail}")]
    SpectrumOutOfDomain { function: String, detail: String },

    #[error("quadrature did not converge: node doubling changed the result by {change:e}")]
    QuadratureNotConverged { change: f64 },

    #[error("bad dimension {dim} for fixture `{kind}`")]
    BadDimension { kind: String, dim: usize },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
