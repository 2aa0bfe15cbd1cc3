use thiserror::Error;

use crate::io::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("voter {voter} ranks alternative `{id}` more than once")]
    DuplicateAlternativeInRanking { voter: usize, id: String },
    #[error("voter {voter} ranks {found} alternatives, expected {expected}")]
    RankingSizeMismatch { voter: usize, expected: usize, found: usize },
    #[error("committee size {k} is outside 1..={m}")]
    CommitteeSizeOutOfRange { k: usize, m: usize },
    #[error("alternative id `{0}` is declared twice")]
    DuplicateAlternativeId(String),
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("an election needs at least one voter")]
    EmptyElectorate,
    #[error("metric has no position for {0}")]
    MissingPosition(String),
    #[error("voter {voter} is equidistant from `{a}` and `{b}`")]
    MidpointTie { voter: usize, a: String, b: String },
    #[error("profile is not realizable on a line: {0}")]
    NotLineRealizable(String),
    #[error("rule needs committee size {expected}, election asks for {found}")]
    CommitteeSizeMismatch { expected: usize, found: usize },
    #[error("need {needed} alternatives, only {available} available")]
    InsufficientAlternatives { needed: usize, available: usize },
    #[error("committee size {k} leaves no interior committee among {m} ordered alternatives")]
    CommitteeSizeTooLarge { k: usize, m: usize },
    #[error("invalid committee: {0}")]
    InvalidCommittee(String),
    #[error("work budget of {limit} exceeded ({required} required)")]
    BudgetExceeded { limit: u64, required: u64 },
    #[error("optimal committee has zero cost while the chosen one does not")]
    ZeroOptimum,
    #[error("no voter prefers the first alternative; the bound is vacuous")]
    DivisionByZero,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("distortion is unbounded over consistent metrics")]
    Unbounded,
    #[error("composition phases must be ordered by non-increasing distortion bound")]
    PhaseOrder,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Stable machine-readable category used by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse(_) => "syntax",
            Error::BudgetExceeded { .. } => "budget",
            Error::NotLineRealizable(_) => "not-line-realizable",
            Error::MissingPosition(_) | Error::MidpointTie { .. } => "metric",
            Error::ParameterOutOfRange(_) | Error::PreconditionViolated(_) => "parameter",
            Error::Unbounded | Error::ZeroOptimum | Error::DivisionByZero => "unbounded",
            _ => "data",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
