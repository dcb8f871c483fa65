use thiserror::Error;

/// Errors produced by the library. Variants map onto the CLI exit codes
/// through [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex `{0}` has no outgoing edge (every vertex needs a successor)")]
    DeadEndVertex(String),
    #[error("edge `{0}` -> `{1}` references an unknown vertex")]
    DanglingEdge(String, String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid play prefix: {0}")]
    InvalidPrefix(String),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("invalid dickson pair: {0}")]
    InvalidPair(String),
    #[error("penalty value {value} is below f(0) = {floor}")]
    BelowRange { value: String, floor: String },
    #[error("invalid penalty function: {0}")]
    InvalidPenalty(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("strategy does not fit the arena: {0}")]
    IncompatibleStrategy(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("size limit exceeded: {what} needs {needed} vertices, limit is {limit}")]
    SizeLimit {
        what: String,
        needed: u128,
        limit: u128,
    },
    #[error("enumeration budget of {budget} strategies exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("adversary script exhausted after {0} moves")]
    ScriptExhausted(usize),
    #[error("illegal scripted move `{from}` -> `{to}`")]
    IllegalScriptedMove { from: String, to: String },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Semantic {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("mean-payoff solution could not be verified: {0}")]
    Unverified(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Semantic,
    Limit,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::BadParams(_) => ErrorKind::Usage,
            Error::SizeLimit { .. } | Error::BudgetExceeded { .. } | Error::Overflow(_) => {
                ErrorKind::Limit
            }
            _ => ErrorKind::Semantic,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
