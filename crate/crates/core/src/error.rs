use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("size {got} exceeds the limit {limit} for {what}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("degenerate box: edge {index} has length {length}")]
    DegenerateBox { index: usize, length: f64 },

    #[error("unsupported dimension {0}; only n = 2 and n = 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("epsilon {eps} outside the admissible range ({lo}, {hi}]")]
    InvalidEps { eps: f64, lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("net coverage violated at index {index}: distance {distance} >= eps {eps}")]
    CoverageViolation { index: u64, distance: f64, eps: f64 },

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("lexicographic tie between distinct box vertices")]
    LexicographicTie,

    #[error("resample budget of {0} attempts exhausted")]
    ResampleBudget(usize),

    #[error("separation certificate refuted at {failures} cell(s)")]
    CertificateRefuted { failures: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
