use thiserror::Error;

/// Coarse failure classes; the CLI maps these onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    /// Malformed input or a structural check that did not hold.
    Validation,
    /// A computed bound disagrees with its closed form.
    BoundMismatch,
    /// A configured size limit would be exceeded.
    ResourceLimit,
    /// I/O and serialization problems.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty Pauli word")]
    EmptyWord,

    #[error("unknown character {0:?} in Pauli word")]
    UnknownChar(char),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("generator {0} is not a Hermitian word with sign +1 or -1")]
    NotHermitian(usize),

    #[error("generator {0} contains Y; only X, Z and identity can be assigned observables")]
    ContainsY(usize),

    #[error("set does not stabilize a nontrivial subspace: {0}")]
    InvalidStabilizer(String),

    #[error("kernel enumeration needs 2^{dim} products, cap is {cap}")]
    KernelCap { dim: usize, cap: u64 },

    #[error("{what} of size {size} exceeds limit {limit}")]
    Limit { what: &'static str, size: usize, limit: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "closed-form and block-form generators disagree for N={n}:\n  closed: {closed:?}\n  blocks: {blocks:?}"
    )]
    ConstructionMismatch { n: usize, closed: Vec<String>, blocks: Vec<String> },

    #[error("{stage}: expected {expected}, got {actual}")]
    BoundMismatch { stage: String, expected: f64, actual: f64 },

    #[error("numerical check failed: {what} (residual {residual:.3e})")]
    Numerical { what: String, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Limit { .. } | Error::KernelCap { .. } => Category::ResourceLimit,
            Error::BoundMismatch { .. } => Category::BoundMismatch,
            Error::Io(_) | Error::Json(_) => Category::Io,
            _ => Category::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
