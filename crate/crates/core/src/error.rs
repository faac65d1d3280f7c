use thiserror::Error;

/// Errors raised by the library. Each variant maps onto a stable machine-readable code
/// used by the CLI error JSON.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("rejected surface signature (g={genus}, n={punctures}): {reason}")]
    RejectSignature { genus: i64, punctures: i64, reason: &'static str },

    #[error("weight vector has length {got}, triangulation has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weights are not valid normal coordinates ({violations} violations)")]
    InvalidCoordinates { violations: usize },

    #[error("curves are not pairwise disjoint")]
    NotDisjoint,

    #[error("multicurve lists the same isotopy class twice")]
    DuplicateComponent,

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("origin curve is not in the universe")]
    OriginMissing,

    #[error("endpoint fails the essentially-non-separating vertex test")]
    PreconditionVertex,

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CoreError {
    pub fn code(&self) -> &'static str {
        match self {
            CoreError::RejectSignature { .. } => "REJECT_SIGNATURE",
            CoreError::LengthMismatch { .. } => "LENGTH_MISMATCH",
            CoreError::InvalidCoordinates { .. } => "INVALID_COORDINATES",
            CoreError::NotDisjoint => "NOT_DISJOINT",
            CoreError::DuplicateComponent => "DUPLICATE_COMPONENT",
            CoreError::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
            CoreError::OriginMissing => "ORIGIN_MISSING",
            CoreError::PreconditionVertex => "PRECONDITION_VERTEX",
            CoreError::InvalidLoop(_) => "INVALID_LOOP",
            CoreError::Malformed(_) => "MALFORMED",
            CoreError::Invariant(_) => "INVARIANT_VIOLATION",
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
