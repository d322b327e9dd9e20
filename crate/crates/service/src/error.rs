use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cjrank_core::{Error, ErrorKind};
use serde::Serialize;

/// JSON error body: `{code, message, detail}`.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: serde_json::Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let status = match err.kind() {
            ErrorKind::Validation | ErrorKind::Numerical => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Conflict => StatusCode::CONFLICT,
            ErrorKind::Io => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let (code, detail) = match &err {
            Error::InvalidParameter(_) => ("invalid_parameter", serde_json::Value::Null),
            Error::InvalidArgument(_) => ("invalid_argument", serde_json::Value::Null),
            Error::InvalidExperiment(_) => ("invalid_experiment", serde_json::Value::Null),
            Error::DegenerateInput { index, .. } => ("degenerate_input", serde_json::json!({ "index": index })),
            Error::NonIdentifiable { components } => (
                "non_identifiable",
                serde_json::json!({ "components": components }),
            ),
            Error::MalformedLog { position, .. } => ("malformed_log", serde_json::json!({ "position": position })),
            Error::UndefinedCorrelation(_) => ("undefined_correlation", serde_json::Value::Null),
            Error::UnknownExperiment(id) => ("unknown_experiment", serde_json::json!({ "experiment_id": id })),
            Error::UnknownSession(id) => ("unknown_session", serde_json::json!({ "session_id": id })),
            Error::DuplicateJudgement { session, left, right } => (
                "duplicate_judgement",
                serde_json::json!({ "session_id": session, "left": left, "right": right }),
            ),
            Error::PairNotDealt { session, left, right } => (
                "pair_not_dealt",
                serde_json::json!({ "session_id": session, "left": left, "right": right }),
            ),
            Error::WinnerNotInPair { winner, left, right } => (
                "winner_not_in_pair",
                serde_json::json!({ "winner": winner, "left": left, "right": right }),
            ),
            Error::Load { line, .. } => ("load_error", serde_json::json!({ "line": line })),
            Error::Io { .. } => ("io_error", serde_json::Value::Null),
            Error::Json(_) | Error::Csv(_) => ("encoding_error", serde_json::Value::Null),
        };
        ApiError::new(status, code, err.to_string()).with_detail(detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, "{}", self.message);
        }
        (self.status, Json(self)).into_response()
    }
}
