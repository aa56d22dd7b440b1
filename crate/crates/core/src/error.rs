use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorMismatch { left: u8, right: u8 },
    #[error("generator index {index} out of range 1..={count}")]
    GeneratorIndex { index: usize, count: u8 },
    #[error("odd argument passed where an even element is required")]
    OddArgument,
    #[error("singular input: {0}")]
    Singular(String),
    #[error("expansion points differ: {0}")]
    ExpansionMismatch(String),
    #[error("truncation underflow: input must be tracked to order at least {required}")]
    TruncationUnderflow { required: i64 },
    #[error("exponential series did not stabilise: {0}")]
    NonConvergent(String),
    #[error("generator {symbol} is not part of the {algebra} algebra")]
    AlgebraMismatch { symbol: String, algebra: String },
    #[error("vector is not homogeneous in level")]
    NonHomogeneous,
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
