use thiserror::Error;

/// Errors produced by estimators, model fitting and explanations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimensions, names, ranges).
    #[error("input error: {0}")]
    Input(String),

    /// A wrapped model violated the prediction contract at construction time.
    #[error("explainer construction error: {0}")]
    Construction(String),

    /// Model fitting failed (no events, non-finite likelihood, no convergence).
    #[error("fit error: {0}")]
    Fit(String),

    /// A quantity is mathematically undefined for the given data.
    #[error("undefined: {0}")]
    Undefined(String),

    /// Numerical failure (degenerate weights, singular systems).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Prefix the message with context, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            Error::Construction(m) => Error::Construction(format!("{ctx}: {m}")),
            Error::Fit(m) => Error::Fit(format!("{ctx}: {m}")),
            Error::Undefined(m) => Error::Undefined(format!("{ctx}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("{ctx}: {m}")),
        }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Construction(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
