use thiserror::Error;

/// Errors shared across the crate.
///
/// The CLI maps these onto exit codes: input/parse problems exit 1,
/// mathematical inconsistencies exit 2, exceeded search budgets exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime")]
    NotPrime(u32),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of bounds ({bound})")]
    IndexOutOfBounds { index: usize, bound: usize },

    #[error("rows do not pairwise commute: rows {0} and {1} have symplectic product {2}")]
    NonCommuting(usize, usize, u32),

    #[error("cannot parse pauli string {input:?}: {reason}")]
    PauliParse { input: String, reason: String },

    #[error("trace produced rank {got} from a full-rank input, expected {expected}; contracted pair has vanishing overlap")]
    TraceRank { got: usize, expected: usize },

    #[error("traced legs must be distinct and unused: leg {0}")]
    LegReuse(usize),

    #[error("network is malformed: {0}")]
    Network(String),

    #[error("dangling leg {0} has no role and no default role was given")]
    MissingRole(String),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("operator is not in the row space")]
    NotInRowSpace,

    #[error("symbolic labels {0} and {1} do not match across a traced pair")]
    LabelMismatch(String, String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
