use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The raw curvature datum violates one of its type invariants.
    #[error("invalid space data: {0}")]
    InvalidSpec(String),

    #[error("commutator [D_{i}, D_{k}] is not a linear combination of the holonomy generators")]
    CommutatorOutsideSpan { i: usize, k: usize },

    #[error("holonomy generators are linearly dependent (rank {rank} < {p})")]
    DegenerateBasis { rank: usize, p: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("unknown space '{0}'")]
    UnknownSpace(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("space failed symmetric-space validation: {0}")]
    Validation(String),

    #[error("expansion needs {words} index words, over the budget of {budget}; lower the order or use a numeric method")]
    OrderTooLarge { words: u64, budget: u64 },

    #[error("factor report has order {have}, but order {want} was requested")]
    OrderMismatch { have: usize, want: usize },

    #[error("t must be positive, got {0}")]
    NonPositiveT(f64),

    #[error("{hits} samples landed within the pole margin (limit {limit})")]
    SingularityHit { hits: u64, limit: u64 },

    #[error("quadrature is only available for p <= 3 (p = {0}); use Monte Carlo")]
    QuadratureDimension(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
