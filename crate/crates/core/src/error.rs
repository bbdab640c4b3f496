use crate::json::JsonError;
use crate::pattern::PatternError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("invalid schema at {path}: {message}")]
    InvalidSchema { path: String, message: String },
    #[error("unsupported keyword use at {path}: {message}")]
    UnsupportedKeyword { path: String, message: String },
    #[error("unresolvable reference `{0}`")]
    UnresolvableRef(String),
    #[error("reference normalization grew the document beyond {limit} nodes")]
    RefExpansionTooLarge { limit: usize },
    #[error("propertyNames expansion exceeded its budget of {limit} steps")]
    ExpansionBudgetExceeded { limit: usize },
    #[error("unguarded recursion through variable `{0}`")]
    UnguardedRecursion(String),
    #[error("undefined variable `{0}`")]
    UndefinedVariable(String),
    #[error("unbound variable `{0}` in assignment")]
    UnboundVariable(String),
    #[error("variable `{0}` has no complement yet")]
    MissingComplement(String),
    #[error("more than {limit} variables created")]
    VariableBudgetExceeded { limit: usize },
    #[error("disjunctive normal form exceeds {limit} conjunctions")]
    DnfTooLarge { limit: usize },
    #[error("generated value {0} failed the self-check against the input schema")]
    SelfCheck(String),
    #[error("time budget exhausted")]
    Timeout,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
