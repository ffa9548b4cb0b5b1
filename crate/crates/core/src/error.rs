use thiserror::Error;

/// Errors raised anywhere in the benchmark library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group rank {0}: SU(N) needs N >= 2")]
    InvalidGroupRank(usize),

    #[error("decomposition error: {0}")]
    Decomposition(String),

    #[error("local lattice {local:?} is below the 8x4x4x4 floor")]
    FloorViolation { local: [usize; 4] },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("collective call sequence mismatch on rank {rank}")]
    CollectiveMismatch { rank: usize },

    #[error("CG did not converge after {iterations} iterations (best relative residual {best_residual:e})")]
    NonConvergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
