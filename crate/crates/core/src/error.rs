//! Error type shared by the whole crate.

/// Errors produced by parsing, evaluation, and the geometric pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {func}({value}) is undefined")]
    DomainError { func: &'static str, value: f64 },

    #[error("syntax error at byte {position}: expected {expected}")]
    SyntaxError { position: usize, expected: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("variable `{name}` is out of range for chart dimension {dim}")]
    VariableOutOfRange { name: String, dim: usize },

    #[error("function `{0}` takes exactly one argument")]
    ArityError(String),

    #[error("seed index {seed} out of range for jet dimension {dim}")]
    SeedOutOfRange { seed: usize, dim: usize },

    #[error("matrix is singular (pivot below threshold)")]
    SingularMatrix,

    #[error("framing is singular at {point:?}")]
    SingularFraming { point: Vec<f64> },

    #[error("point {point:?} is outside the chart domain")]
    DomainBoundary { point: Vec<f64> },

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension {0} is odd; an even dimension is required here")]
    OddDimension(usize),

    #[error("framing is not flat: {0}")]
    NotFlat(String),

    #[error("development left the chart domain at {point:?}")]
    DomainEscape { point: Vec<f64> },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("unknown tensor `{0}`")]
    UnknownTensor(String),

    #[error("invalid framing file: {0}")]
    InvalidFraming(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
