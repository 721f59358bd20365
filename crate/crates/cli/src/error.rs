use thiserror::Error;

use projdim_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_AMBIGUOUS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("randers data is not a Finsler metric: max |omega| = {max_norm}")]
    NotFinsler { max_norm: f64 },
    #[error("{0}")]
    Ambiguous(CoreError),
    #[error("check failed: {0}")]
    Numerical(CoreError),
}

impl VerifyError {
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::AmbiguousRank { .. } | CoreError::RankMismatch { .. } => Self::Ambiguous(e),
            CoreError::NotFinsler { max_norm } => Self::NotFinsler { max_norm },
            other => Self::Numerical(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) | Self::NotFinsler { .. } => EXIT_USAGE,
            Self::Ambiguous(_) => EXIT_AMBIGUOUS,
            Self::Numerical(_) => EXIT_CHECK_FAILED,
        }
    }
}
