use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("the zero polynomial has no cyclotomic multiplicity")]
    ZeroPolynomial,
    #[error("cyclotomic order must be at least 1")]
    ZeroOrder,
    #[error("coefficient at exponent {exponent} lies beyond truncation order {order}")]
    BeyondTruncation { exponent: usize, order: usize },
    #[error("requested order {requested} exceeds the determined horizon {horizon}")]
    BeyondHorizon { requested: u64, horizon: u64 },
    #[error("invalid coefficient tuple: {0}")]
    InvalidTuple(String),
    #[error("{ks} is not of theorem form: {reason}")]
    NotTheoremForm { ks: String, reason: String },
    #[error("invalid set prefix: {0}")]
    InvalidPrefix(String),
    #[error("exponent vectors of different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("ordering invariant violated: relation at {at} has {unknowns} unknowns")]
    OrderingInvariant { at: String, unknowns: usize },
    #[error("no certificate found within working box cap {cap}")]
    BoxBudgetExhausted { cap: u32 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
