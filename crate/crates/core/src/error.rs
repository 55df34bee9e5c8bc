use thiserror::Error;

/// Errors raised by the regret engines, oracles and report readers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expert count {0} out of range (2..=8)")]
    ExpertCountOutOfRange(usize),

    #[error("rank out of range: {rank} (k = {k})")]
    RankOutOfRange { rank: usize, k: usize },

    #[error("invalid gap state: {0}")]
    InvalidState(String),

    #[error("gap {gap} exceeds the {bits}-bit packing width")]
    GapOverflow { gap: u32, bits: u32 },

    #[error("subset family is empty")]
    EmptyFamily,

    #[error("subset is for k = {found}, expected k = {expected}")]
    MismatchedK { expected: usize, found: usize },

    #[error("horizon must be at least 1")]
    EmptyHorizon,

    #[error("enumeration budget exceeded: {what}")]
    BudgetExceeded { what: String },

    #[error("series mismatch: {0}")]
    MismatchedSeries(String),

    #[error("empty window [{lo}, {hi}]")]
    EmptyWindow { lo: u32, hi: u32 },

    #[error("node not computed: state {state} with {remaining} days remaining")]
    NodeNotComputed { state: String, remaining: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("csv error: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
