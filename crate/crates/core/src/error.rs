use thiserror::Error;

/// Errors raised by the algebra kernels and the layers built on them.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("constant term is not invertible")]
    InvertNonUnit,
    #[error("precision exhausted: valuation {valuation} is below the denominator budget -{budget}")]
    PrecisionExhausted { valuation: i64, budget: u32 },
    #[error("exp is undefined: constant term must have positive valuation")]
    ExpDomain,
    #[error("log is undefined: constant term must be congruent to 1 mod p")]
    LogDomain,
    #[error("substitution image {index} has a constant term that is not topologically nilpotent")]
    SubstituteDomain { index: usize },
    #[error("series reversion needs an invertible linear part")]
    RevertSingular,
    #[error("connection is not integrable (curvature at t^{exponent:?}, entry ({row},{col}))")]
    NotIntegrable {
        row: usize,
        col: usize,
        exponent: Vec<u32>,
    },
    #[error("matrix is not unipotent upper triangular: {0}")]
    NotUnipotent(String),
    #[error("matrix is singular modulo p^{0}")]
    SingularModPM(u32),
    #[error("Riemann relation {relation} violated at entry ({row},{col}), t^{exponent:?}")]
    RiemannViolation {
        relation: String,
        row: usize,
        col: usize,
        exponent: Vec<u32>,
    },
    #[error("Kodaira-Spencer matrix is singular")]
    KodairaSpencerSingular,
    #[error("{what} is not integral: coefficient of t^{exponent:?} has valuation {valuation}")]
    NotIntegral {
        what: String,
        exponent: Vec<u32>,
        valuation: i64,
    },
    #[error("canonical Frobenius matrix routes disagree at entry ({row},{col}), t^{exponent:?}")]
    MatcanfrobMismatch {
        row: usize,
        col: usize,
        exponent: Vec<u32>,
    },
    #[error("series is not a unit")]
    NotUnit,
    #[error("indicial equation is not theta^4: local exponents at t=0 are not all zero")]
    NotMUM,
    #[error("Yukawa coupling starts with {found}, expected {expected}")]
    NormalizationMismatch { expected: String, found: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
