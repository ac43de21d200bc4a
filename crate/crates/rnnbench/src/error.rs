//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch between {lhs} and {rhs}")]
    DimensionMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },

    #[error("{op}: produced a non-finite value")]
    NonFinite { op: &'static str },

    #[error("backward requires a scalar root, got {rows}x{cols}")]
    NonScalarRoot { rows: usize, cols: usize },

    #[error("{kind} is not handled by the {family} generator")]
    InvalidKind { kind: String, family: &'static str },

    #[error("{kind} generation diverged at step {step}")]
    GenerationDiverged { kind: String, step: usize },

    #[error("fractional order d={d} is outside the stationary range [0, 0.5)")]
    NonstationaryOrder { d: f64 },

    #[error("training partition is constant; min-max scaling is degenerate")]
    DegenerateScale,

    #[error("behavior {behavior} is missing results for {missing}")]
    IncompleteBehavior { behavior: String, missing: String },

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
