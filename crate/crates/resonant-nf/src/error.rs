//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NfError {
    #[error("mixed scalar modes: {0} vs {1}")]
    MixedScalarModes(String, String),

    #[error("series is not real-valued (offending exponent z^{k} zbar^{l} eps^{j})")]
    NotRealValued { k: u32, l: u32, j: u32 },

    #[error("series contains non-resonant terms for n = {n} (exponent z^{k} zbar^{l})")]
    NotResonant { n: u32, k: u32, l: u32 },

    #[error("map is not area-preserving: residual at total order {order} has magnitude {max_abs}")]
    NotAreaPreserving { order: u32, max_abs: f64 },

    #[error("degenerate leading term: {0}")]
    DegenerateLeadingTerm(String),

    #[error("vector field has nonzero divergence at exponent z^{k} zbar^{l} eps^{j}")]
    NonzeroDivergence { k: u32, l: u32, j: u32 },

    #[error("multiplier must be 1 for interpolation, found {0}")]
    MultiplierNotOne(String),

    #[error("generator must have lowest total order >= 3 (found order {0})")]
    GeneratorOrderTooLow(u32),

    #[error("operation unavailable in exact mode: {0}")]
    ExactModeUnsupported(String),

    #[error("linear part is not elliptic: {0}")]
    NotElliptic(String),

    #[error("internal certification failure: {0}")]
    Certification(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NfError>;

impl NfError {
    /// CLI exit code classification.
    pub fn exit_code(&self) -> i32 {
        match self {
            NfError::Certification(_) => 3,
            NfError::InvalidInput(_) | NfError::Json(_) | NfError::Io(_) => 1,
            _ => 2,
        }
    }
}
