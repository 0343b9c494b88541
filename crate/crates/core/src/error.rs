use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),

    #[error("word length must be at least 1")]
    EmptyWord,

    #[error("letter {letter} outside alphabet 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("depth {depth} outside 1..={max}")]
    DepthOutOfRange { depth: usize, max: usize },

    #[error("word length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("missing rate entry for (a={letter}, k={depth})")]
    MissingRate { letter: usize, depth: usize },

    #[error("rate for (a={letter}, k={depth}) must be strictly positive, got {value}")]
    NonPositiveRate {
        letter: usize,
        depth: usize,
        value: String,
    },

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("kernel dimension is {dimension} (rank {rank} of {size}), expected exactly 1")]
    KernelDimension {
        dimension: usize,
        rank: usize,
        size: usize,
    },

    #[error("kernel vector has zero component sum and cannot be normalized")]
    ZeroKernelSum,

    #[error("multiplicities sum to {multiplicities} but polynomial has degree {degree}")]
    MultiplicityMismatch { multiplicities: usize, degree: usize },

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("invalid correlation query: {0}")]
    InvalidQuery(String),

    #[error("state space of {states} words exceeds the dense oracle cap of {cap}")]
    CapExceeded { states: usize, cap: usize },

    #[error("invalid simulation horizon: {0}")]
    InvalidHorizon(String),

    #[error("support mismatch between distributions")]
    SupportMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
