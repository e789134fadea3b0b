use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("outside the domain of the formula: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// All probability has left the postselected subspace.
    #[error("postselected ensemble is empty at t = {time}")]
    DegeneratePostselection { time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
