//! HTTP and JSON facade over architecture sessions, evolution operations,
//! pattern runs and style checks. Payloads reuse the file formats.

mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use archevol_core::cosa::Architecture;
use archevol_core::evolution::{OperationDescriptor, OperationName};
use archevol_core::patterns::builtin_patterns;
use archevol_core::styles::{builtin_styles, check_style, style_by_name};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

pub use error::ApiError;
pub use session::{RunView, Session, Snapshot};

type Shared = Arc<RwLock<Session>>;

/// In-memory session registry.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .expect("session registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
    }
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("request body: {e}")))
}

fn read<T>(s: &Shared, f: impl FnOnce(&Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
    f(&s.read().expect("session lock"))
}

fn write<T>(s: &Shared, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
    f(&mut s.write().expect("session lock"))
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let a = Architecture::from_document(text).map_err(|e| ApiError::bad_request(e.to_string()))?;
    a.validate()
        .map_err(|e| ApiError::unprocessable("the architecture is invalid").with_details(json!(e.0)))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    app.sessions
        .write()
        .expect("session registry lock")
        .insert(id.clone(), Arc::new(RwLock::new(Session::new(id.clone(), a))));
    tracing::info!(session = %id, "session created");
    Ok((StatusCode::CREATED, Json(json!({"sessionId": id, "revision": 0}))).into_response())
}

async fn get_architecture(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Snapshot>, ApiError> {
    read(&app.session(&id)?, |s| s.snapshot()).map(Json)
}

async fn export_architecture(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = read(&app.session(&id)?, |s| Ok(s.architecture.to_canonical()))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct OpRequest {
    expected_revision: u64,
    operation: OperationDescriptor,
}

async fn apply_operation(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: OpRequest = parse(&body)?;
    write(&app.session(&id)?, |s| s.apply(req.expected_revision, &req.operation)).map(Json)
}

fn run_state(s: &Session) -> Result<Json<Value>, ApiError> {
    s.run_view()
        .map(|v| Json(serde_json::to_value(v).expect("run views serialize")))
}

async fn start_pattern(
    State(app): State<AppState>,
    Path((id, name)): Path<(String, String)>,
) -> Result<Json<Value>, ApiError> {
    write(&app.session(&id)?, |s| {
        s.start(&name)?;
        run_state(s)
    })
}

async fn pattern_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    read(&app.session(&id)?, run_state)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionRequest {
    step: String,
    answer: Value,
}

async fn submit_decision(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: DecisionRequest = parse(&body)?;
    write(&app.session(&id)?, |s| {
        s.decide(&req.step, req.answer)?;
        run_state(s)
    })
}

#[derive(Deserialize)]
struct CheckQuery {
    style: Option<String>,
}

async fn check(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CheckQuery>,
) -> Result<Json<Value>, ApiError> {
    let name = q.style.ok_or_else(|| ApiError::bad_request("missing `style` query parameter"))?;
    let style = style_by_name(&name).ok_or_else(|| ApiError::bad_request(format!("no style `{name}`")))?;
    let report = read(&app.session(&id)?, |s| {
        check_style(&s.architecture, &style).map_err(|e| ApiError::unprocessable(e.to_string()))
    })?;
    Ok(Json(serde_json::to_value(report).expect("reports serialize")))
}

async fn styles() -> Json<Value> {
    let docs: Vec<Value> = builtin_styles()
        .iter()
        .map(|s| serde_json::from_str(&s.to_document()).expect("style documents parse"))
        .collect();
    Json(Value::Array(docs))
}

async fn patterns() -> Json<Value> {
    Json(serde_json::to_value(builtin_patterns()).expect("patterns serialize"))
}

async fn operations() -> Json<Value> {
    let ops: Vec<Value> = OperationName::ALL
        .iter()
        .map(|op| {
            let (context, required, optional) = op.signature();
            json!({"name": op.as_str(), "context": context, "required": required, "optional": optional})
        })
        .collect();
    Json(Value::Array(ops))
}

/// The API routes over `state`.
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/architecture", get(get_architecture))
        .route("/sessions/{id}/architecture/document", get(export_architecture))
        .route("/sessions/{id}/ops", post(apply_operation))
        .route("/sessions/{id}/pattern/{name}/start", post(start_pattern))
        .route("/sessions/{id}/pattern/state", get(pattern_state))
        .route("/sessions/{id}/pattern/decision", post(submit_decision))
        .route("/sessions/{id}/check", get(check))
        .route("/styles", get(styles))
        .route("/patterns", get(patterns))
        .route("/operations", get(operations))
        .with_state(state)
}

/// The routes with CORS opened to `allow_origin` when given.
pub fn app(allow_origin: Option<HeaderValue>) -> Router {
    let r = router(AppState::default());
    match allow_origin {
        Some(origin) => r.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods(Any)
                .allow_headers([header::CONTENT_TYPE]),
        ),
        None => r,
    }
}

/// Serves the API until the process ends.
pub async fn serve(addr: SocketAddr, allow_origin: Option<HeaderValue>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app(allow_origin)).await
}
