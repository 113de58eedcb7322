use thiserror::Error;

/// Errors raised by the bound evaluators and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation precondition. `param` names the
    /// offending argument so front ends can map it back to a flag.
    #[error("invalid {param}: {detail}")]
    Domain { param: &'static str, detail: String },

    /// An argument is valid in principle but outside what this routine supports.
    #[error("{param} out of supported range: {detail}")]
    Range { param: &'static str, detail: String },

    /// Root bracketing failed because the target is beyond the search cap.
    #[error("search saturated: {0}")]
    Saturation(String),

    /// A closed form disagreed with its Monte Carlo oracle.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(param: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            param,
            detail: detail.into(),
        }
    }

    pub(crate) fn range(param: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            param,
            detail: detail.into(),
        }
    }

    /// Name of the offending parameter for domain and range errors.
    pub fn param(&self) -> Option<&'static str> {
        match self {
            Error::Domain { param, .. } | Error::Range { param, .. } => Some(param),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
