use alloc::string::String;

/// Errors raised by the fitting, derivative and curation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {context} at row {row}, column {col}")]
    NonFinite {
        context: &'static str,
        row: usize,
        col: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("degenerate leverage at sample {index}: 1 - alpha*h = {margin:e}")]
    DegenerateLeverage { index: usize, margin: f64 },
    #[error("model was fitted with different sample weights")]
    WeightsMismatch,
    #[error("requested {requested} entries, above the cap of {cap}")]
    SizeGuard { requested: usize, cap: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
