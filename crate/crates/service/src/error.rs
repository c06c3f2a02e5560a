//! Structured errors shared by the CLI and the HTTP API.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use healthroute_core::bench::BenchError;
use healthroute_core::planner::{NoRoute, PlanError};
use healthroute_core::scenario::ScenarioError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Wire form of every error: `{code, message, detail}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Error)]
pub enum ServiceError {
    /// Malformed or invalid input; `detail` locates the offending field.
    #[error("{message}")]
    InvalidRequest { message: String, detail: Value },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("no route from {:?} to {:?}", .0.origin, .0.dest)]
    NoRoute(NoRoute),
    #[error("no endpoint at {0}")]
    UnknownPath(String),
    #[error("request body exceeds {0} bytes")]
    PayloadTooLarge(usize),
    #[error(transparent)]
    Scenario(ScenarioError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn invalid(message: impl Into<String>, detail: Value) -> Self {
        ServiceError::InvalidRequest { message: message.into(), detail }
    }

    /// Reports a deserialization failure with the JSON path of the field.
    pub fn from_path_error(err: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let reason = strip_position(&inner.to_string());
        let message = if path == "." { reason.clone() } else { format!("{path}: {reason}") };
        ServiceError::invalid(
            message,
            json!({ "path": path, "reason": reason, "line": inner.line(), "column": inner.column() }),
        )
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::InvalidRequest { .. } => "invalid_request",
            ServiceError::UnknownScenario(_) => "unknown_scenario",
            ServiceError::UnknownNode(_) => "unknown_node",
            ServiceError::NoRoute(_) => "no_route",
            ServiceError::UnknownPath(_) => "not_found",
            ServiceError::PayloadTooLarge(_) => "payload_too_large",
            ServiceError::Scenario(_) => "invalid_scenario",
            ServiceError::Bench(_) => "invalid_bench_spec",
            ServiceError::Io { .. } => "io_error",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::InvalidRequest { .. } | ServiceError::Scenario(_) | ServiceError::Bench(_) => {
                StatusCode::BAD_REQUEST
            }
            ServiceError::UnknownScenario(_) | ServiceError::UnknownNode(_) | ServiceError::UnknownPath(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::NoRoute(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::PayloadTooLarge(_) => StatusCode::PAYLOAD_TOO_LARGE,
            ServiceError::Io { .. } | ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn detail(&self) -> Value {
        match self {
            ServiceError::InvalidRequest { detail, .. } => detail.clone(),
            ServiceError::UnknownScenario(name) => json!({ "scenario": name }),
            ServiceError::UnknownNode(id) => json!({ "node": id }),
            ServiceError::UnknownPath(path) => json!({ "path": path }),
            ServiceError::NoRoute(no_route) => serde_json::to_value(no_route).unwrap_or(Value::Null),
            ServiceError::PayloadTooLarge(limit) => json!({ "limit_bytes": limit }),
            ServiceError::Scenario(ScenarioError::Parse { line, column, .. }) => {
                json!({ "line": line, "column": column })
            }
            ServiceError::Scenario(ScenarioError::Validation(violations)) => {
                json!({ "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>() })
            }
            ServiceError::Io { path, .. } => json!({ "path": path }),
            _ => Value::Null,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody { code: self.code().to_owned(), message: self.to_string(), detail: self.detail() }
    }
}

/// serde_json appends " at line L column C"; the position is reported
/// separately in `detail`.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_owned(),
        None => message.to_owned(),
    }
}

impl From<ScenarioError> for ServiceError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { path, source } => ServiceError::Io { path, source },
            other => ServiceError::Scenario(other),
        }
    }
}

impl From<PlanError> for ServiceError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::UnknownNode(id) => ServiceError::UnknownNode(id),
            PlanError::InvalidAlpha(_) => ServiceError::invalid(e.to_string(), json!({ "path": "alpha" })),
            PlanError::InvalidDepartTime(_) => ServiceError::invalid(e.to_string(), json!({ "path": "depart_t" })),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(code = self.code(), "{self}");
        }
        (self.status(), Json(self.body())).into_response()
    }
}
