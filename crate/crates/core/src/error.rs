use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field of order {p}^{m} exceeds the supported size 2^16")]
    UnsupportedSize { p: u32, m: u32 },
    #[error("no primitive polynomial available for GF({p}^{m})")]
    NoPrimitivePoly { p: u32, m: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {m} over GF({p})")]
    InvalidModulus { p: u32, m: u32 },
    #[error("value {value} is not an element of a field of order {q}")]
    InvalidElement { value: u32, q: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,

    #[error("network graph contains a cycle")]
    CyclicGraph,
    #[error("edge order is not ancestral: edge {first} feeds edge {second}")]
    BadOrdering { first: usize, second: usize },
    #[error("transfer matrix at sink {0} is rank deficient")]
    RankDeficientSink(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("encoder would need {states} states (cap {cap})")]
    TooManyStates { states: u64, cap: u64 },
    #[error("generator matrix has a zero row or is zero")]
    ZeroGenerator,
    #[error("invalid rate {k}/{n}: need 0 < k < n")]
    BadRate { k: usize, n: usize },
    #[error("block has {got} symbols, expected {expected}")]
    BlockSizeMismatch { expected: usize, got: usize },
    #[error("generator matrix is catastrophic")]
    Catastrophic,
    #[error("truncated-codeword search exceeded the depth cap of {cap} segments")]
    DepthCapExceeded { cap: usize },

    #[error("enumeration of {size} items exceeds the cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("invalid error pattern: {0}")]
    InvalidPattern(String),
    #[error("set is empty")]
    EmptySet,
    #[error("no code with the required free distance up to degree {max_degree}")]
    NoCodeFound { max_degree: usize },
    #[error("exhaustive code search supports only k = 1, got k = {0}")]
    UnsupportedRank(usize),
    #[error("free distance {dfree} is below the required {required}")]
    InsufficientFreeDistance { dfree: usize, required: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
