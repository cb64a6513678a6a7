use thiserror::Error;

/// Errors shared by all probe modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller broke a precondition (bad dimension, out-of-range index,
    /// malformed schedule, unknown format, ...). CLI maps this to the
    /// usage exit code.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A function under test produced NaN or infinity.
    #[error("non-finite evaluation at {context}")]
    NonFinite { context: String },

    /// A least-squares fit had no unique solution.
    #[error("rank-deficient sample set: {0}")]
    RankDeficient(String),

    /// A derivative estimate never met its convergence tolerance.
    #[error("derivative estimate did not converge for {context}; last gap {last_gap:e}")]
    NonConvergence { context: String, last_gap: f64 },

    /// Corpus lookup failed.
    #[error("unknown function id `{0}`")]
    UnknownFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
