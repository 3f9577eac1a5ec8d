use alloc::string::String;

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("predicted cardinality {predicted} exceeds the cap {cap}")]
    CapExceeded { predicted: u128, cap: u128 },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("accuracy target {target:e} not reached (achieved {achieved:e})")]
    Accuracy { achieved: f64, target: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
