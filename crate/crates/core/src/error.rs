use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("laurent polynomial `{0}` is not invertible and the division is not exact")]
    NonInvertibleLaurent(String),
    #[error("cannot specialize q at 0")]
    ZeroSpecialization,
    #[error("laurent exponent overflow")]
    ExponentOverflow,
    #[error("cannot parse scalar `{input}` at offset {offset}: {reason}")]
    ScalarSyntax {
        input: String,
        offset: usize,
        reason: String,
    },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("leg position out of range: {0}")]
    OutOfRange(String),
    #[error("projector pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("bad index range: {0}")]
    BadRange(String),
    #[error("generator index {index} does not fit on {legs} strands")]
    StrandOverflow { index: usize, legs: usize },
    #[error("representation has no inverse generator image")]
    MissingInverse,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("a t-lift solving (1 - sigma) t = C is required")]
    LiftRequired,
    #[error("word of length {found} exceeds the degree cap {cap}")]
    DegreeCapExceeded { found: usize, cap: usize },
    #[error("bar chain degree {0} is too low for the boundary")]
    DegreeTooLow(usize),
    #[error("algebra file: {0}")]
    Format(String),
}
