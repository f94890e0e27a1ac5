use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty composition")]
    EmptyComposition,

    /// `a_1 = 0` would put infinitely many chains on every degree.
    #[error("leading exponent weight a_1 must be at least 1")]
    NonSummable,

    #[error("composition {indices:?} is invalid for family {family}: {reason}")]
    InvalidComposition {
        family: &'static str,
        indices: Vec<u32>,
        reason: &'static str,
    },

    #[error("operator {op} requires a zero constant-in-t row")]
    ConstantRow { op: &'static str },

    #[error("precondition violated: {0}")]
    Domain(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    /// A well-typed but incomplete or contradictory invocation.
    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
