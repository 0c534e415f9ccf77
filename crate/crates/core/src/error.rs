use crate::arith::Place;

/// Errors raised by the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MwError {
    #[error("zero is not a valid input here")]
    ZeroInput,
    #[error("symbol entries must be nonzero")]
    ZeroEntry,
    #[error("cannot factor a {digits}-digit integer (limit is {limit} digits)")]
    FactorizationOverflow { digits: usize, limit: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("place mismatch: {left} vs {right}")]
    PlaceMismatch { left: Place, right: Place },
    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),
    #[error("degree {0} is not supported by this operation")]
    UnsupportedDegree(i64),
    #[error("idele is not in the kernel of the projection to classical ideles")]
    NotInKernel,
    #[error("dyadic places are not supported by this operation")]
    DyadicUnsupported,
    #[error("{0} does not define a quadratic extension (need squarefree d, d != 0, 1)")]
    InvalidExtension(i64),
}

pub type Result<T> = std::result::Result<T, MwError>;
