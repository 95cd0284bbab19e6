use thiserror::Error;

use crate::fock::FockCutoff;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid cutoff {d_x}x{d_y}: every mode needs at least 2 levels")]
    InvalidCutoff { d_x: usize, d_y: usize },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: FockCutoff, right: FockCutoff },

    #[error("matrix shape {rows}x{cols} does not match joint dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix exponential of an anti-Hermitian input is not unitary (deviation {0:e})")]
    UnitarityLost(f64),

    #[error("truncation insufficient: boundary leakage {leakage:e} exceeds {tolerance:e}")]
    TruncationInsufficient { leakage: f64, tolerance: f64 },

    #[error("hidden-index fit undefined: a_x^dagger rho vanishes")]
    UndefinedFit,

    #[error("coherence order ({m_x},{m_y},{n_x},{n_y}) is too close to the cutoff {cutoff}")]
    OrderTooHigh {
        m_x: usize,
        m_y: usize,
        n_x: usize,
        n_y: usize,
        cutoff: FockCutoff,
    },

    #[error("polarization index undefined: projection onto the reference vector vanishes")]
    UndefinedIndex,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
