use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use dhub_core::{EngineError, IntakeError, ServiceError, StoreError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>, details: Value) -> Self {
        ApiError { status, body: ErrorBody { code: code.to_string(), message: message.into(), details } }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message, Value::Null)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message, Value::Null)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = %self.body.code, "{}", self.body.message);
        }
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::NotFound { kind, id } => {
                ApiError::new(StatusCode::NOT_FOUND, "not_found", message, json!({ "kind": kind, "id": id }))
            }
            StoreError::Dangling { from, kind, missing } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "dangling_reference",
                message,
                json!({ "from": from, "kind": kind, "missing": missing }),
            ),
            StoreError::Referenced { kind, id, referrers } => ApiError::new(
                StatusCode::CONFLICT,
                "referenced",
                message,
                json!({ "kind": kind, "id": id, "referrers": referrers }),
            ),
            StoreError::RoleMismatch(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "role_mismatch", message, Value::Null)
            }
            StoreError::KindConflict { id, existing } => {
                ApiError::new(StatusCode::CONFLICT, "kind_conflict", message, json!({ "id": id, "existing": existing }))
            }
            StoreError::Validation(violations) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message, json!(violations))
            }
            StoreError::IllegalTransition { from, to } => {
                ApiError::new(StatusCode::CONFLICT, "illegal_transition", message, json!({ "from": from, "to": to }))
            }
            StoreError::State(_) => ApiError::new(StatusCode::CONFLICT, "invalid_state", message, Value::Null),
            StoreError::Format(_) => ApiError::internal(message),
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::ProviderMismatch { .. } => ApiError::internal(message),
            EngineError::ZeroTopK => ApiError::new(StatusCode::BAD_REQUEST, "invalid_top_k", message, Value::Null),
            EngineError::DegenerateProfile | EngineError::InvalidWeight { .. } | EngineError::UnnormalizedProfile(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "invalid_profile", message, Value::Null)
            }
        }
    }
}

impl From<IntakeError> for ApiError {
    fn from(e: IntakeError) -> Self {
        let message = e.to_string();
        match e {
            IntakeError::Incomplete { missing } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "intake_incomplete",
                message,
                json!({ "missing": missing }),
            ),
            IntakeError::Parse { question_id, kind, value } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "intake_parse",
                message,
                json!({ "question_id": question_id, "expected": kind, "value": value }),
            ),
            IntakeError::UnknownQuestion(_) | IntakeError::DuplicateAnswer(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "intake_answers", message, Value::Null)
            }
            IntakeError::Templates(_) => ApiError::internal(message),
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Store(e) => e.into(),
            ServiceError::Engine(e) => e.into(),
            ServiceError::Intake(e) => e.into(),
            ServiceError::BadRequest(m) => ApiError::bad_request(m),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(e.status(), "bad_request", e.body_text(), Value::Null)
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}
