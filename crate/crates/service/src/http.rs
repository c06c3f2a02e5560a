//! HTTP API over preloaded, read-only scenarios.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::routing::{get, post};
use axum::{Json, Router};
use healthroute_core::planner::RouteResult;
use healthroute_core::scenario::{load_scenario_file, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::trace::TraceLayer;

use crate::documents::{self, parse_json, CompareBody, CompareDocument, RouteBody, ScenarioInfo, ScenarioSummary};
use crate::error::ServiceError;

pub const DEFAULT_BODY_LIMIT: usize = 1024 * 1024;
pub const DEFAULT_CORS_ORIGIN: &str = "http://localhost:5173";

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub scenarios: Vec<PathBuf>,
    pub default_alpha: f64,
    pub body_limit: usize,
    pub log_level: String,
    pub cors_origins: Vec<String>,
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        let fail = |path: &str, message: String| Err(ServiceError::invalid(message, json!({ "path": path })));
        if self.bind.port() == 0 {
            return fail("bind", "port must be in [1, 65535]".into());
        }
        if self.scenarios.is_empty() {
            return fail("scenarios", "at least one scenario must be preloaded".into());
        }
        if !(self.default_alpha.is_finite() && self.default_alpha >= 0.0) {
            return fail("default_alpha", format!("alpha must be finite and >= 0, got {}", self.default_alpha));
        }
        if self.body_limit == 0 {
            return fail("body_limit", "body limit must be > 0".into());
        }
        for origin in &self.cors_origins {
            if HeaderValue::from_str(origin).is_err() {
                return fail("cors_origins", format!("invalid origin {origin:?}"));
            }
        }
        Ok(())
    }
}

/// Shared, immutable service state.
#[derive(Debug, Clone)]
pub struct AppState {
    scenarios: Arc<BTreeMap<String, Scenario>>,
    default_alpha: f64,
    body_limit: usize,
}

impl AppState {
    /// Indexes scenarios by name; names must be unique.
    pub fn new(scenarios: Vec<Scenario>, default_alpha: f64) -> Result<Self, ServiceError> {
        let mut by_name = BTreeMap::new();
        for s in scenarios {
            let name = s.name().to_owned();
            if by_name.insert(name.clone(), s).is_some() {
                return Err(ServiceError::invalid(
                    format!("scenario name {name:?} is loaded twice"),
                    json!({ "path": "scenarios", "scenario": name }),
                ));
            }
        }
        Ok(Self { scenarios: Arc::new(by_name), default_alpha, body_limit: DEFAULT_BODY_LIMIT })
    }

    pub fn load(config: &ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let scenarios = config.scenarios.iter().map(load_scenario_file).collect::<Result<Vec<_>, _>>()?;
        Self::new(scenarios, config.default_alpha)
    }

    fn scenario(&self, name: &str) -> Result<&Scenario, ServiceError> {
        self.scenarios.get(name).ok_or_else(|| ServiceError::UnknownScenario(name.to_owned()))
    }
}

/// Builds the API router. Pass an empty origin list to disable CORS.
pub fn router(mut state: AppState, body_limit: usize, cors_origins: &[String]) -> Router {
    state.body_limit = body_limit;
    let mut app = Router::new()
        .route("/healthz", get(healthz))
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/scenarios/{name}", get(scenario_summary))
        .route("/api/route", post(route))
        .route("/api/compare", post(compare))
        .fallback(fallback)
        .layer(DefaultBodyLimit::max(body_limit))
        .layer(TraceLayer::new_for_http())
        .with_state(state);
    let origins: Vec<HeaderValue> = cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    if !origins.is_empty() {
        app = app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    app
}

/// Serves `app` on `listener` until ctrl-c.
pub async fn serve(listener: TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub name: String,
    pub version: String,
    pub scenarios: usize,
}

async fn healthz(State(state): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        name: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenarios: state.scenarios.len(),
    })
}

async fn list_scenarios(State(state): State<AppState>) -> Json<Vec<ScenarioInfo>> {
    Json(state.scenarios.values().map(ScenarioInfo::of).collect())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryQuery {
    t: Option<f64>,
}

async fn scenario_summary(
    State(state): State<AppState>,
    Path(name): Path<String>,
    query: Result<Query<SummaryQuery>, QueryRejection>,
) -> Result<Json<ScenarioSummary>, ServiceError> {
    let Query(query) = query.map_err(|e| ServiceError::invalid(e.body_text(), json!({ "path": "t" })))?;
    let scenario = state.scenario(&name)?;
    let at = query.t.unwrap_or_else(|| scenario.timeline().frames.first().map_or(0.0, |f| f.timestamp_s));
    Ok(Json(ScenarioSummary::of(scenario, at)?))
}

fn body_bytes(state: &AppState, body: Result<Bytes, BytesRejection>) -> Result<Bytes, ServiceError> {
    body.map_err(|e| match e.status() {
        StatusCode::PAYLOAD_TOO_LARGE => ServiceError::PayloadTooLarge(state.body_limit),
        _ => ServiceError::invalid(e.body_text(), json!({ "path": "." })),
    })
}

/// Planning is CPU-bound, so it runs off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn route(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<RouteResult>, ServiceError> {
    let body: RouteBody = parse_json(&body_bytes(&state, body)?)?;
    blocking(move || {
        let scenario = state.scenario(&body.scenario)?;
        documents::route(&body.request(state.default_alpha), scenario)
    })
    .await
    .map(Json)
}

async fn compare(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<CompareDocument>, ServiceError> {
    let body: CompareBody = parse_json(&body_bytes(&state, body)?)?;
    blocking(move || {
        let scenario = state.scenario(&body.scenario)?;
        documents::compare(&body.request(state.default_alpha), scenario)
    })
    .await
    .map(Json)
}

async fn fallback(uri: Uri) -> ServiceError {
    ServiceError::UnknownPath(uri.path().to_owned())
}
