use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} must be an odd prime below 65536")]
    InvalidPrime(u64),
    #[error("negative exponent on non-inverted variable `{var}`")]
    NegativeExponent { var: String },
    #[error("coefficient of term `{term}` is not divisible by p")]
    NotDivisibleByP { term: String },
    #[error("exponent {exponent} of `{var}` in term `{term}` is not divisible by p")]
    ExponentNotDivisible {
        term: String,
        var: String,
        exponent: i32,
    },
    #[error("not a unit of the chart ring: {0}")]
    NotAUnit(String),
    #[error(
        "nilpotency violation: M^{power} has nonzero entry ({row}, {col}) = {entry}"
    )]
    NilpotencyViolation {
        power: usize,
        row: usize,
        col: usize,
        entry: String,
    },
    #[error("variable mismatch: {0}")]
    VarMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid atlas: {0}")]
    Atlas(String),
    #[error("invalid sheaf: {0}")]
    Sheaf(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degree bound {0} exceeded: no unimodular frame found")]
    DegreeBoundExceeded(usize),
    #[error("no gauge isomorphism found within degree bound {0} (inconclusive)")]
    GaugeNotFound(usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("scene: {0}")]
    Scene(String),
    #[error("unknown gallery item `{0}`")]
    UnknownGallery(String),
}
