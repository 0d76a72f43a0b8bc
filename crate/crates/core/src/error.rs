use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("density or derivative is unbounded at x = 0 (shape {shape})")]
    Pole { shape: f64 },

    #[error("degenerate distribution: all weights are zero")]
    Degenerate,

    #[error("total shape {total} too small for derivative order {order}")]
    InsufficientShape { total: f64, order: u8 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no sign change of the density curvature found: {0}")]
    NoSignChange(String),

    #[error("refused: {0}")]
    RegionRefusal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
