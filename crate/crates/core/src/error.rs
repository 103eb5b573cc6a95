use thiserror::Error;

/// Errors raised by the crystal library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("p^N = {p}^{precision} does not fit the 62-bit coefficient budget")]
    PrecisionTooLarge { p: u64, precision: u32 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("polygon heights differ ({0} vs {1})")]
    HeightMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("elements live in different Witt rings")]
    RingMismatch,

    #[error("matrix is not invertible at working precision")]
    NotInvertible,

    #[error("slopes are not separable at working precision: {0}")]
    NotSeparable(String),

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("EL degree {m} does not divide the residue degree {s}")]
    DegreeMismatch { m: usize, s: usize },

    #[error("slope multiplicity violation: {0}")]
    MultiplicityViolation(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("datum is not Hodge-Newton reducible for the requested partition")]
    NotHNReducible,

    #[error("inconsistent sigma-orbit: {0}")]
    InconsistentOrbit(String),

    #[error("f' case table does not cover character {index}: (f1, f2) = ({f1}, {f2})")]
    UncoveredCase { index: usize, f1: usize, f2: usize },

    #[error("crystal is not integral (p-power denominator {0})")]
    NotIntegral(u32),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short variant name used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::PrecisionTooLarge { .. } => "PrecisionTooLarge",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::HeightMismatch(..) => "HeightMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::RingMismatch => "RingMismatch",
            Error::NotInvertible => "NotInvertible",
            Error::NotSeparable(_) => "NotSeparable",
            Error::InvalidGrading(_) => "InvalidGrading",
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::MultiplicityViolation(_) => "MultiplicityViolation",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::NotHNReducible => "NotHNReducible",
            Error::InconsistentOrbit(_) => "InconsistentOrbit",
            Error::UncoveredCase { .. } => "UncoveredCase",
            Error::NotIntegral(_) => "NotIntegral",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Precision-related failures, as opposed to domain failures.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::PrecisionTooLarge { .. } | Error::NotSeparable(_)
        )
    }

    pub(crate) fn exhausted(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
