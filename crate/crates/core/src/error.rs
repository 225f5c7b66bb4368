use alloc::string::String;

/// Errors raised by the embedding core.
///
/// Variants fall in three families that callers map to distinct exit codes:
/// domain errors (bad input or parameters), numeric errors (non-finite values
/// or failed convergence), and precondition violations on oracle inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    Dimension {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("block {block} stayed rank deficient after {attempts} sketch draws")]
    Degenerate { block: usize, attempts: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn dims(op: &'static str, expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::Dimension {
            op,
            expected: alloc::format!("{}x{}", expected.0, expected.1),
            found: alloc::format!("{}x{}", found.0, found.1),
        }
    }

    /// True for errors caused by floating point trouble rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::Degenerate { .. })
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
