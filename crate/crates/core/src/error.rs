use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("element {element} is out of range for domain `{domain}` of size {size}")]
    OutOfRange {
        element: usize,
        domain: String,
        size: usize,
    },

    #[error("arity mismatch in {context}: expected {expected}, found {found}")]
    ArityMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn arity(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::ArityMismatch {
            context: context.into(),
            expected,
            found,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
