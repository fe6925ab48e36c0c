use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns one of these.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for a set of size {size}")]
    OutOfRange { index: usize, size: usize },

    #[error("map `{0}` is not injective")]
    NotInjective(String),

    #[error("`{0}` is not a bijection")]
    NotBijective(String),

    #[error("guard exceeded while enumerating {what}: {needed} items > limit {limit}")]
    GuardExceeded { what: String, needed: u128, limit: u64 },

    #[error("tree axiom ({axiom}) violated: {detail}")]
    TreeAxiom { axiom: u8, detail: String },

    #[error("edge {0} is not a leaf")]
    NotALeaf(usize),

    #[error("power series has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("expected a one-colour polynomial (|I| = |J| = 1)")]
    MultiColour,

    #[error("requested order {requested} exceeds available truncation {available}")]
    Truncation { requested: usize, available: usize },

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("missing domain data: {0}")]
    MissingDomain(String),

    #[error("Segal condition fails: {0}")]
    NotSegal(String),

    #[error("operation outside the truncation: {0}")]
    OutsideTruncation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
