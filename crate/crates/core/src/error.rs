use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty clip: the two clip rays coincide")]
    EmptyClip,
    #[error("clip too large: {got} vertices exceeds cap {cap}")]
    ClipTooLarge { got: usize, cap: usize },
    #[error("interior ray found no boundary hit (inconsistent predicates)")]
    NoRayHit,
    #[error("degenerate query: {0}")]
    DegenerateQuery(String),
    #[error("prime table exhausted for m = {0}")]
    PrimeTableExhausted(u64),
    #[error("sequence index {index} out of range 1..={len}")]
    SeqIndexOutOfRange { index: u64, len: u64 },
    #[error("solver recursion depth would exceed dimension {dim}; instance violates the basis axioms")]
    DepthExceeded { dim: usize },
    #[error("PRG restart cap {0} exceeded; instance contract is likely broken")]
    RestartCap(usize),
    #[error("workspace budget exceeded at {tag}: {current} + {charge} > {budget} words")]
    WorkspaceBudget {
        tag: &'static str,
        current: u64,
        charge: u64,
        budget: u64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
