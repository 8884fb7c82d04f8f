use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = PcpError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PcpError {
    #[error("matrix has {len} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular value decomposition failed to converge")]
    SvdNoConvergence,

    #[error("iterative estimate did not reach tolerance after {iterations} iterations (best estimate {estimate})")]
    NotConverged { iterations: usize, estimate: f64 },

    #[error("effective rank exceeds {rank}: sigma_{{r+1}}/sigma_1 = {ratio:e}")]
    RankExceeded { rank: usize, ratio: f64 },

    #[error("||P_Omega P_T|| = {norm} is not bounded away from one; the Neumann series diverges")]
    SeriesDivergent { norm: f64 },

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("sweep grid incomplete, missing cells: {0}")]
    IncompleteGrid(String),

    #[error("config hash mismatch for {path}: expected {expected}, found {found}")]
    ConfigMismatch { path: PathBuf, expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PcpError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        PcpError::InvalidParameter { name, reason: reason.into() }
    }
}
