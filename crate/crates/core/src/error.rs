use std::collections::BTreeMap;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{rows}x{cols} matrix exceeds the size cap of {cap}x{cap}")]
    SizedInput { rows: usize, cols: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("eigensolver did not converge on a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("principal logarithm is ambiguous: eigenvalue within tolerance of -1")]
    BranchAmbiguity,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("every eigenvalue pair was discarded as real")]
    AllDiscarded,

    #[error("postselection for n = {target} failed after {attempts} attempts; observed {histogram:?}")]
    Postselection {
        target: usize,
        attempts: usize,
        histogram: BTreeMap<usize, usize>,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::DegenerateInput(_)
                | Error::NoConvergence { .. }
                | Error::Numerical(_)
                | Error::BranchAmbiguity
                | Error::AllDiscarded
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
