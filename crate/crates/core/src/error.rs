use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),
    /// A geometric construction failed one of its own certificates.
    #[error("construction error: {0}")]
    Construction(String),
    /// A computed quantity contradicts an identity that must hold exactly
    /// (lost precision, asymmetric Gram matrix, ...).
    #[error("numeric integrity error: {0}")]
    NumericIntegrity(String),
    /// A certificate cannot be applied to the given data.
    #[error("certificate inapplicable: {0}")]
    Inapplicable(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        Error::NumericIntegrity(msg.into())
    }
}
