use thiserror::Error;

/// Errors produced by tensor construction, solvers and file ingestion.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PiezoError {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entries are not symmetric in the last two indices: |a[{i},{j},{k}] - a[{i},{k},{j}]| = {deviation:e}")]
    Asymmetric {
        i: usize,
        j: usize,
        k: usize,
        deviation: f64,
    },

    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    AsymmetricMatrix { deviation: f64 },

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("matrix is not orthogonal (max |Q^T Q - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported dimension {0} (grid oracle handles n = 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("solver miss: largest value found {found} is below the grid lower bound {bound}")]
    SolverMiss { found: f64, bound: f64 },

    #[error("unfolding bound violated: lambda* = {lambda_star} exceeds mu* = {mu_star}; re-run with more starts")]
    GapViolation { lambda_star: f64, mu_star: f64 },

    #[error("point group {group} takes {expected} parameters, got {found}")]
    ParamCount {
        group: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unknown point group '{0}'")]
    UnknownPointGroup(String),

    #[error("alpha must be nonzero")]
    ZeroAlpha,

    #[error("unknown dataset '{name}'; available: {available}")]
    UnknownDataset { name: String, available: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PiezoError {
    fn from(err: std::io::Error) -> Self {
        PiezoError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PiezoError>;
