use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {p}^{n} exceeds the supported range 2^31")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("residues belong to different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("{a} is not invertible modulo {q}")]
    NotInvertible { a: i128, q: u64 },
    #[error("{a} is not a unit modulo {p}")]
    UnitRequired { a: i128, p: u64 },
    #[error("{0} is not a quadratic residue modulo {1}")]
    NotResidue(i128, u64),
    #[error("denominator vanishes modulo {p} at the evaluation point")]
    DenominatorNotUnit { p: u64 },
    #[error("denominator polynomial is zero")]
    ZeroDenominator,
    #[error("parameter t = {t} is not admissible modulo {p}")]
    InadmissibleParameter { t: u64, p: u64 },
    #[error("({y1}, {y2}) is not a unit point on the circle")]
    InvalidPoint { y1: u64, y2: u64 },
    #[error("({x1}, {x2}, {x3}) is not a unit solution modulo {q}")]
    InvalidSolution { x1: i64, x2: i64, x3: i64, q: u64 },
    #[error("closed-form evaluation does not apply: {0}")]
    HypothesisViolated(String),
    #[error("(k1, k2) = (0, 0) has no exponential-sum spec")]
    DegenerateFrequency,
    #[error("prime {0} is too small: counting requires p > 5")]
    SmallPrime(u64),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("N = {n_box} is not below sqrt(q/2) for q = {q}")]
    RangeViolation { n_box: u64, q: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Variant name, for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotOddPrime(_) => "NotOddPrime",
            Error::ZeroExponent => "ZeroExponent",
            Error::ModulusTooLarge { .. } => "ModulusTooLarge",
            Error::ModulusMismatch(..) => "ModulusMismatch",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::UnitRequired { .. } => "UnitRequired",
            Error::NotResidue(..) => "NotResidue",
            Error::DenominatorNotUnit { .. } => "DenominatorNotUnit",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::InadmissibleParameter { .. } => "InadmissibleParameter",
            Error::InvalidPoint { .. } => "InvalidPoint",
            Error::InvalidSolution { .. } => "InvalidSolution",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::DegenerateFrequency => "DegenerateFrequency",
            Error::SmallPrime(_) => "SmallPrime",
            Error::TooLarge(_) => "TooLarge",
            Error::RangeViolation { .. } => "RangeViolation",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
