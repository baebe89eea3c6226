use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coset limit of {limit} exceeded during enumeration")]
    CosetLimitExceeded { limit: usize },

    #[error("order cap exceeded: order {order} > cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid word: generator index {index} out of range (num_gens = {num_gens})")]
    InvalidWord { index: usize, num_gens: usize },

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("subgroup does not belong to this group")]
    MismatchedParents,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("strategy `{strategy}` not applicable: {reason}")]
    StrategyUnsupported { strategy: String, reason: String },

    #[error("generator images do not extend to a homomorphism (at x = {x}, s = {s})")]
    NotAHomomorphism { x: usize, s: usize },

    #[error("unknown catalog group `{0}`")]
    UnknownGroup(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code contract: 1 for input errors, 2 for resource limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CosetLimitExceeded { .. } | Error::OrderCapExceeded { .. } => 2,
            _ => 1,
        }
    }
}
