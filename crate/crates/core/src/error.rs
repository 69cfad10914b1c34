use thiserror::Error;

/// Errors surfaced by the library. Every fallible operation returns one of
/// these; the CLI maps them onto exit codes (1 for validation errors, 2 for
/// resource-cap aborts).
#[derive(Debug, Error)]
pub enum Error {
    #[error("reducible permutation")]
    Reducible,

    #[error("permutation must have at least two symbols")]
    TooShort,

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not primitive")]
    NotPrimitive,

    #[error("power iteration did not converge within {0} steps")]
    NonConvergence(usize),

    #[error("degenerate (measure-zero) input: lambda_m equals lambda_{{pi^-1 m}}")]
    DegenerateTie,

    #[error("non-generic stall: comparison type unchanged after {0} elementary steps")]
    Stall(usize),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("word not admissible")]
    NotAdmissible,

    #[error("action undefined: word does not start at the given permutation")]
    ActionUndefined,

    #[error("word not compatible with point")]
    Incompatible,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bound too large: {0}")]
    BoundTooLarge(String),

    #[error("node budget exceeded after {visited} nodes")]
    BudgetExceeded { visited: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
