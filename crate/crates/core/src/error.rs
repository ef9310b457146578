use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("branch for residue {residue} is not integral: {a}*{residue} + {b} is not divisible by {modulus}")]
    Integrality {
        residue: u64,
        a: i64,
        b: i64,
        modulus: u64,
    },

    #[error("function has a fixed point at x = {x}")]
    FixedPoint { x: u64 },

    #[error("branch for residue {residue} is the identity map")]
    EmptyBranch { residue: u64 },

    #[error("arithmetic overflow evaluating at x = {x}")]
    Overflow { x: u64 },

    #[error("empty input")]
    EmptyInput,

    #[error("the local function has a cycle")]
    CyclePresent,

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("vector is not fixed by the matrix")]
    NotACycle,

    #[error("size {size} exceeds limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by numeric range or size caps rather than by bad input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. } | Error::SizeLimitExceeded { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
