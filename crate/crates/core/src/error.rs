//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),

    #[error("rejection sampling failed after {attempts} attempts: {reason}")]
    RejectionFailed { attempts: usize, reason: String },

    #[error("T60 of {t60} s is infeasible for this room: Sabine absorption {alpha:.4} >= 1")]
    InfeasibleT60 { t60: f64, alpha: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("all-zero impulse response")]
    AllZeroRir,

    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular matrix at frequency bin {bin}")]
    SingularMatrix { bin: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("degenerate target: trace of Phi_n^-1 Phi_x below {0:e}")]
    DegenerateTarget(f64),

    #[error("cannot define SNR: images are all zero")]
    ZeroSignal,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
