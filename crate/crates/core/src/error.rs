use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("invalid saturated set: {0}")]
    InvalidSet(String),

    #[error("no feasible maximum exists for this channel")]
    Infeasible,

    #[error("invalid critical point: {0}")]
    InvalidCriticalPoint(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
