use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A function argument lies outside the function's domain.
    #[error("argument outside domain: {0}")]
    Domain(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    /// The zero-forcing design matrix is rank deficient.
    #[error("channel is singular: design matrix is rank deficient")]
    SingularChannel,
    /// The RLS gain denominator collapsed.
    #[error("numerical breakdown: RLS gain denominator magnitude {0:e}")]
    NumericalBreakdown(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
