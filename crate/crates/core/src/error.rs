use thiserror::Error;

use crate::multiindex::MultiIndex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IvhsError {
    #[error("invalid parameters: {0}")]
    Param(String),

    #[error(
        "hypothesis d >= 2 + 4/m violated for m={m}, d={d} (need m*d >= 2m + 4, got {lhs} < {rhs})"
    )]
    Hypothesis { m: u32, d: u32, lhs: u32, rhs: u32 },

    #[error("multi-index length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{index} is not a member of I_{degree}")]
    NotInIndexSet { index: MultiIndex, degree: u32 },

    #[error("counting lemma falsified at k={k}: #A_k = {found} < {bound}")]
    CountingLemma {
        k: MultiIndex,
        found: usize,
        bound: usize,
    },

    #[error("witness system overdetermined for m={m}, d={d}: only the zero solution exists")]
    WitnessOverdetermined { m: u32, d: u32 },

    #[error("generator {index} is not homogeneous")]
    NonHomogeneous { index: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("soundness violation: {0}")]
    Soundness(String),
}

pub type Result<T, E = IvhsError> = std::result::Result<T, E>;
