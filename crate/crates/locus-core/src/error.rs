use thiserror::Error;

/// Errors raised by field construction, code construction, and the
/// parameter gates in front of them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the 2^16 cap")]
    OrderOverCap(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("no irreducible modulus of degree {0} found (internal)")]
    NoModulus(u32),
    #[error("{n} does not divide q-1 = {q_minus_1}")]
    NotARootOrder { n: usize, q_minus_1: usize },
    #[error("element {value} has multiplicative order {actual}, expected {expected}")]
    WrongOrder {
        value: u16,
        actual: usize,
        expected: usize,
    },
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("value {value} is outside [0, {q})")]
    ValueOutOfRange { value: u64, q: u64 },
    #[error("message has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("parameter gate failed: {0}")]
    Parameter(String),
    #[error("locality precondition failed: {0}")]
    Locality(String),
    #[error("the I-submatrix is singular for n={n}, k={k}, j={j}: {detail}")]
    SingularSubmatrix {
        n: usize,
        k: usize,
        j: usize,
        detail: String,
    },
    #[error("subfield check failed: generator coefficient {value} is not in GF({q_base})")]
    SubfieldCoefficient { value: u16, q_base: u64 },
    #[error("config error: {0}")]
    Config(String),
}

/// Shorthand for a parameter-gate failure with a formatted message.
pub fn gate(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub type Result<T> = std::result::Result<T, Error>;
