use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("numerical blow-up at step {step}, branch {branch}, node {node}: value {value}")]
    NumericalBlowup {
        step: usize,
        branch: usize,
        node: usize,
        value: f64,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
