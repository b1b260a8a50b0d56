use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The covariance could not be factorized even after the largest
    /// permitted diagonal jitter. Signals a collapsed population.
    #[error("degenerate Gaussian model: factorization failed with jitter up to {jitter:e}")]
    DegenerateModel { jitter: f64 },

    #[error("evaluation budget of {max_fes} exhausted")]
    BudgetExhausted { max_fes: u64 },

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
