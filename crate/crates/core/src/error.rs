use thiserror::Error;

use crate::model::GraphStats;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A model invariant does not hold. `invariant` names it, e.g. `v_s ∈ V_ts`.
    #[error("invalid model: {invariant} violated ({detail})")]
    InvalidModel { invariant: String, detail: String },

    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },

    #[error("invalid coverage spec: {0}")]
    InvalidSpec(String),

    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("cycle enumeration exceeded cap of {cap} cycles; statistics are partial")]
    CycleCap { cap: usize, partial: Box<GraphStats> },

    #[error("unsatisfiable targets: {reason}")]
    Unsatisfiable {
        reason: String,
        last: Option<Box<GraphStats>>,
    },

    #[error("insufficient defect candidates: {0}")]
    InsufficientCandidates(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(invariant: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvalidModel {
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_) | Error::CycleCap { .. })
    }
}
