use std::path::PathBuf;

use thiserror::Error;

use crate::cohort::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("episode {episode_id}: {}", join_violations(.violations))]
    Validation {
        episode_id: String,
        violations: Vec<Violation>,
    },

    #[error("duplicate episode_id {0:?}")]
    DuplicateId(String),

    #[error("line {line}: row has {found} cells but the header has {expected}")]
    WidthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: unknown token {token:?} for feature {feature:?}")]
    UnknownToken {
        line: usize,
        feature: String,
        token: String,
    },

    #[error("unknown feature {0:?}")]
    UnknownFeature(String),

    #[error("feature file: {0}")]
    MalformedMatrix(String),

    #[error("{0}")]
    Domain(String),

    #[error("cohort is empty")]
    EmptyCohort,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("training set contains a single class")]
    SingleClass,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector has {found} features but the model expects {expected}")]
    MalformedVector { expected: usize, found: usize },
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
