use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An order, count or index argument is outside its admissible range.
    #[error("arity error: {0}")]
    Arity(String),

    /// Points or measures do not live on the same product space.
    #[error("shape error: {0}")]
    Shape(String),

    /// A numeric argument lies outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An order-k mixing atom lies on the excluded boundary set.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    /// An input that must be a probability does not have unit mass.
    #[error("mass error: {0}")]
    Mass(String),

    /// A variable index is empty or out of range.
    #[error("index error: {0}")]
    Index(String),

    /// The factor list does not admit the witness construction.
    #[error("witness error: {0}")]
    Witness(String),

    /// Malformed caller-supplied data.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
