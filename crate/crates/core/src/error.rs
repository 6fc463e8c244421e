use thiserror::Error;

/// Every failure mode of the library. `name()` gives the stable identifier
/// used in machine-readable output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not a unit (divisible by p = {p})")]
    NonUnit { p: u64 },
    #[error("denominator {denominator} is not invertible in the target ring")]
    DenominatorNotInvertible { denominator: String },
    #[error("fiber is not ordinary: H(lambda) = 0")]
    NotOrdinary,
    #[error("parameter lambda is 0 or 1")]
    SingularParameter,
    #[error("fiber is singular: t^(n+1) = 1")]
    SingularFiber,
    #[error("parameter t = 0 is not supported by this operation")]
    ZeroParameter,
    #[error("estimated cost {estimate} exceeds budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("characteristic {p} divides n + 1 = {n_plus_one}")]
    BadCharacteristic { p: u64, n_plus_one: u64 },
    #[error("linear coefficient of the logarithm is not a unit")]
    NonUnitLinearTerm,
    #[error("coefficient {coefficient} does not lie in the target ring")]
    NonIntegralCoefficient { coefficient: String },
    #[error("degree {have} is below the required {need}")]
    InsufficientDegree { have: usize, need: usize },
    #[error("parameter set is not stable under a -> 1 - a")]
    ParameterSetNotSymmetric,
    #[error("series is not a solution of the operator through order {order}")]
    NotASolution { order: usize },
    #[error("modulus {p}^{prec} does not fit in 63 bits")]
    PrecisionOverflow { p: u64, prec: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal consistency check failed: {0}")]
    ConsistencyFailure(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonUnit { .. } => "NonUnit",
            Error::DenominatorNotInvertible { .. } => "DenominatorNotInvertible",
            Error::NotOrdinary => "NotOrdinary",
            Error::SingularParameter => "SingularParameter",
            Error::SingularFiber => "SingularFiber",
            Error::ZeroParameter => "ZeroParameter",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::BadCharacteristic { .. } => "BadCharacteristic",
            Error::NonUnitLinearTerm => "NonUnitLinearTerm",
            Error::NonIntegralCoefficient { .. } => "NonIntegralCoefficient",
            Error::InsufficientDegree { .. } => "InsufficientDegree",
            Error::ParameterSetNotSymmetric => "ParameterSetNotSymmetric",
            Error::NotASolution { .. } => "NotASolution",
            Error::PrecisionOverflow { .. } => "PrecisionOverflow",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ConsistencyFailure(_) => "ConsistencyFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
