use crate::cost::Cost;

/// Errors raised by the library.
///
/// Constraint failure is never an error: it shows up as a verdict or as a
/// `Failed` session phase. These variants cover malformed input, misuse of
/// the session lifecycle and exhausted resource budgets.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("symbol `{0}` is not part of the alphabet")]
    UnknownSymbol(String),
    #[error("lifecycle violation: {0}")]
    Lifecycle(String),
    #[error("resource limit exceeded: {what}")]
    Resource { what: String, best: Option<Cost> },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>) -> Self {
        Error::Resource { what: what.into(), best: None }
    }

    /// True for errors caused by the caller's data rather than by limits.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::UnknownSymbol(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
