use thiserror::Error;

use crate::model::{DeploymentStatus, EntityKind};
use crate::validate::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed country code {0:?}: expected two uppercase ASCII letters")]
    MalformedCountry(String),
    #[error("unknown {kind} {value:?}")]
    UnknownVariant { kind: &'static str, value: String },
    #[error("invalid money amount {0:?}")]
    InvalidMoney(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("provider {given} does not own solution {solution} (expected {expected})")]
    ProviderMismatch { solution: String, expected: String, given: String },
    #[error("top_k must be at least 1")]
    ZeroTopK,
    #[error("degenerate profile: all weights are zero")]
    DegenerateProfile,
    #[error("weight {index} is negative or not finite: {value}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("profile weights sum to {0}, expected 1")]
    UnnormalizedProfile(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotaError {
    #[error("shares sum to {0}, expected 100")]
    ShareSum(u32),
    #[error("cannot apportion zero units")]
    ZeroUnits,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Quota(#[from] QuotaError),
}

/// Problems reading or writing dataset and snapshot files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed file at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unresolved reference: {}", .0.join("; "))]
    UnresolvedReference(Vec<String>),
    #[error("invalid records: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{kind} {id} not found")]
    NotFound { kind: EntityKind, id: String },
    #[error("integrity error: {from} references missing {kind} {missing}")]
    Dangling { from: String, kind: EntityKind, missing: String },
    #[error("integrity error: {kind} {id} is referenced by {}", .referrers.join(", "))]
    Referenced { kind: EntityKind, id: String, referrers: Vec<String> },
    #[error("integrity error: {0}")]
    RoleMismatch(String),
    #[error("id {id} already belongs to a {existing}")]
    KindConflict { id: String, existing: EntityKind },
    #[error("validation failed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
    #[error("illegal deployment transition {from:?} -> {to:?}")]
    IllegalTransition { from: DeploymentStatus, to: DeploymentStatus },
    #[error("state error: {0}")]
    State(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntakeError {
    #[error("incomplete answers, missing: {}", .missing.join(", "))]
    Incomplete { missing: Vec<String> },
    #[error("question {question_id}: cannot parse {value:?} as {kind}")]
    Parse { question_id: String, kind: &'static str, value: String },
    #[error("unknown question {0}")]
    UnknownQuestion(String),
    #[error("duplicate answer for question {0}")]
    DuplicateAnswer(String),
    #[error("invalid template set: {0}")]
    Templates(String),
}
