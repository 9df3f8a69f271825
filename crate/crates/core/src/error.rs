use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A sampling or quadrature estimate could not be formed.
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    /// An algorithm failed in a way that should not happen for in-scope inputs.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("invalid description: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
