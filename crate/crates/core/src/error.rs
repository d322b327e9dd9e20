use std::path::PathBuf;

use crate::ids::ItemId;

/// Broad classification used by front ends to pick exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: arguments, payloads, configuration, malformed records.
    Validation,
    /// A lookup for something that does not exist.
    NotFound,
    /// A request that conflicts with recorded state (duplicate judgement, closed session).
    Conflict,
    /// Filesystem or encoding failures.
    Io,
    /// The data admit no numerical answer (non-identifiable fit, undefined statistic).
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("degenerate input: item at index {index} {reason}")]
    DegenerateInput { index: usize, reason: &'static str },

    #[error("Bradley-Terry maximum likelihood does not exist: win graph splits into components {}", format_components(.components))]
    NonIdentifiable { components: Vec<Vec<ItemId>> },

    #[error("malformed log at record {position}: {reason}")]
    MalformedLog { position: usize, reason: String },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("pair {left} vs {right} of session `{session}` was already judged")]
    DuplicateJudgement {
        session: String,
        left: ItemId,
        right: ItemId,
    },

    #[error("pair {left} vs {right} was not dealt in session `{session}`")]
    PairNotDealt {
        session: String,
        left: ItemId,
        right: ItemId,
    },

    #[error("winner {winner} is not one of {left}, {right}")]
    WinnerNotInPair {
        winner: ItemId,
        left: ItemId,
        right: ItemId,
    },

    #[error("{path}:{line}: {reason}")]
    Load {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

fn format_components(components: &[Vec<ItemId>]) -> String {
    components
        .iter()
        .map(|c| {
            let ids: Vec<String> = c.iter().map(ToString::to_string).collect();
            format!("{{{}}}", ids.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_)
            | Error::InvalidArgument(_)
            | Error::InvalidExperiment(_)
            | Error::MalformedLog { .. }
            | Error::WinnerNotInPair { .. }
            | Error::PairNotDealt { .. }
            | Error::Load { .. }
            | Error::Csv(_)
            | Error::Json(_) => ErrorKind::Validation,
            Error::UnknownExperiment(_) | Error::UnknownSession(_) => ErrorKind::NotFound,
            Error::DuplicateJudgement { .. } => ErrorKind::Conflict,
            Error::Io { .. } => ErrorKind::Io,
            Error::DegenerateInput { .. }
            | Error::NonIdentifiable { .. }
            | Error::UndefinedCorrelation(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
