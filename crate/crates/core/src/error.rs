use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not hyperbolic: trace {0} < 2")]
    NotHyperbolic(f64),

    #[error("non-discrete group: element with |trace| = {trace} found at word length {depth}")]
    NonDiscrete { trace: f64, depth: usize },

    #[error("spectrum incomplete: x = {x} exceeds the certified bound {bound}")]
    SpectrumIncomplete { x: f64, bound: f64 },

    #[error("no eigenvalues")]
    NoEigenvalues,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("series diverges for x = {0} (need x > 1)")]
    SeriesDiverges(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero data too shallow: need T = {needed:.6e}, have {have:.6e}; largest feasible n is {max_n}")]
    InsufficientDepth { needed: f64, have: f64, max_n: i64 },

    #[error("overlapping intervals: [{0}, {1}) and [{2}, {3})")]
    Overlap(f64, f64, f64, f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
