//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a prime: {0}")]
    NonPrime(u64),
    #[error("modulus is not a monic irreducible of the right degree over F_{p}: {detail}")]
    ReducibleModulus { p: u64, detail: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("enumeration of {size} elements exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u64 },
    #[error("matrix with {entries} entries exceeds cap {cap}")]
    MatrixTooLarge { entries: u128, cap: u64 },
    #[error("curve is contained in the hypersurface")]
    CurveContained,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("norm exponent must be >= 1, got {0}")]
    BadExponent(f64),
    #[error("exponents (p={p}, q={q}) outside the admissible region: {detail}")]
    ExponentOutOfRange { p: f64, q: f64, detail: String },
    #[error("curve {index} does not pass through its anchor")]
    AnchorMissing { index: usize },
    #[error("curve {index} is contained in the ambient algebraic set")]
    ContainmentViolation { index: usize },
    #[error("curve {index} meets E in {got} points, fewer than lambda = {need}")]
    IntersectionTooSmall { index: usize, got: usize, need: u64 },
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("construction requires odd characteristic")]
    EvenCharacteristic,
    #[error("line direction has no unit coordinate")]
    DegenerateDirection,
    #[error("divisor is not a unit")]
    NonUnitDivisor,
    #[error("operation is not supported for this ring kind")]
    UnsupportedRing,
    #[error("set is not Kakeya: no line in direction {0}")]
    NotKakeya(String),
    #[error("empty set")]
    EmptySet,
    #[error("degree {0} exceeds the configured cap")]
    DegreeTooLarge(u64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}
