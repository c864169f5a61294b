use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pauli word {word:?}: illegal character {ch:?} at position {position}")]
    IllegalPauli {
        word: String,
        ch: char,
        position: usize,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{n} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("unknown builtin ansatz {0:?} (expected h2_ucc, lih_ucc, hehp_ucc or h2_nonconvex)")]
    UnknownAnsatz(String),

    #[error("grid scan over {dim} parameters is not supported (max {max})")]
    ScanDimension { dim: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite {what} for member {member} at iteration {iteration}")]
    NonFinite {
        what: &'static str,
        member: usize,
        iteration: usize,
    },

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
