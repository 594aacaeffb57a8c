use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration cap exceeded: {requested} cubes > cap {cap}")]
    EnumerationCap { requested: u64, cap: u64 },

    #[error("integration failed on ball centered {center:?} radius {radius}: {reason}")]
    Integration {
        center: Vec<f64>,
        radius: f64,
        reason: String,
    },

    #[error("infeasible constraint mask: {0}")]
    InfeasibleMask(String),

    #[error("evaluation at an atom of the measure")]
    EvalAtAtom,

    #[error("contradictory evidence: {0}")]
    ContradictoryEvidence(String),

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
