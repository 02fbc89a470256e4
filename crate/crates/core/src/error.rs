use thiserror::Error;

use crate::optimize::Selection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: value {value} of attribute `{attribute}` is outside its domain [0, {cardinality})")]
    Domain {
        line: u64,
        attribute: String,
        value: u64,
        cardinality: usize,
    },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("event log is empty")]
    EmptyLog,

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("enumeration limit exceeded: {cells} outcome cells > {limit}")]
    EnumerationLimit { cells: u128, limit: u128 },

    #[error("universe of {size} attributes exceeds the exhaustive-search limit of {limit}")]
    UniverseTooLarge { size: usize, limit: usize },

    #[error("no feasible selection under budget {budget} (cheapest cost found {cheapest})")]
    Infeasible { budget: f64, cheapest: f64 },

    #[error("local search exceeded {max_passes} passes; best objective so far {}", best.evaluation.objective)]
    PassLimit {
        max_passes: usize,
        best: Box<Selection>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
