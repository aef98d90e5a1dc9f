//! HTTP service over the sedmap engine.
//!
//! All routes live under `/v1/`. Bodies are JSON documents in the same
//! format the CLI reads and writes; errors carry a machine-readable `code`
//! and a human `message`.

pub mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use sedmap_core::format::{load_map, load_registry, save_registry, KnowledgeBase, FORMAT_VERSION};
use sedmap_core::map::ValidationReport;
use sedmap_core::Error as EngineError;

use api::Failure;
use store::{MapStore, StoreError, StoredMap};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    /// Allowed CORS origins; empty disables CORS headers.
    pub cors_origins: Vec<String>,
}

pub struct AppState {
    pub store: MapStore,
    /// Canonical registry document served at `/v1/registry`.
    pub registry: Vec<u8>,
}

impl AppState {
    /// Opens the store under `data_dir`; uses `data_dir/registry.json` when
    /// present, the bundled knowledge base otherwise.
    pub fn open(data_dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let data_dir = data_dir.into();
        let store = MapStore::open(&data_dir)?;
        let registry_path = data_dir.join("registry.json");
        let kb = if registry_path.exists() {
            let bytes = std::fs::read(&registry_path).map_err(StoreError::Io)?;
            load_registry(&bytes).map_err(StoreError::Format)?
        } else {
            KnowledgeBase::bundled()
        };
        Ok(Self { store, registry: save_registry(&kb) })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("server i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Structured error response.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<ViolationBody>,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ViolationBody {
    pub code: String,
    pub message: String,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status, body: ErrorBody { code: code.into(), message: message.into(), violations: Vec::new() } }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", format!("map `{id}` not found"))
    }

    fn invalid(report: ValidationReport) -> Self {
        let mut e = Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid-map", report.to_string());
        e.body.violations = report
            .violations
            .iter()
            .map(|v| ViolationBody { code: v.code().into(), message: v.to_string() })
            .collect();
        e
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<Failure> for ApiError {
    fn from(f: Failure) -> Self {
        match f {
            Failure::BadRequest(msg) => ApiError::new(StatusCode::BAD_REQUEST, "malformed-body", msg),
            Failure::Invalid(r) => ApiError::invalid(r),
            Failure::Engine(e) => {
                let code = match &e {
                    EngineError::Unreachable => "unreachable-target",
                    EngineError::AllEdgesLocked { .. } => "all-edges-locked",
                    EngineError::NoTarget => "no-target",
                    EngineError::UnknownFactor(_) => "unknown-factor",
                    EngineError::HorizonMismatch { .. } => "horizon-mismatch",
                    _ => "engine-error",
                };
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(id) => ApiError::not_found(&id),
            StoreError::Format(f) => Failure::from(f).into(),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "store-error", other.to_string()),
        }
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared, cors_origins: &[String]) -> Router {
    let app = Router::new()
        .route("/v1/maps", post(create_map).get(list_maps))
        .route("/v1/maps/{id}", get(get_map).put(put_map).delete(delete_map))
        .route("/v1/maps/{id}/simulate", post(simulate))
        .route("/v1/maps/{id}/analyze", post(analyze))
        .route("/v1/maps/{id}/stabilize", post(stabilize))
        .route("/v1/maps/{id}/scenarios/run", post(scenario_run))
        .route("/v1/maps/{id}/scenarios/compare", post(scenario_compare))
        .route("/v1/maps/{id}/scenarios/invert", post(scenario_invert))
        .route("/v1/registry", get(registry))
        .with_state(state);
    if cors_origins.is_empty() {
        return app;
    }
    let origins: Vec<HeaderValue> = cors_origins.iter().filter_map(|o| o.parse().ok()).collect();
    app.layer(
        CorsLayer::new()
            .allow_origin(AllowOrigin::list(origins))
            .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
            .allow_headers([header::CONTENT_TYPE]),
    )
}

/// Binds `0.0.0.0:port` and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = Arc::new(AppState::open(&config.data_dir)?);
    let app = router(state, &config.cors_origins);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    let bad = |m: String| ApiError::new(StatusCode::BAD_REQUEST, "malformed-body", m);
    let value: serde_json::Value = if body.iter().all(u8::is_ascii_whitespace) {
        serde_json::Value::Object(Default::default())
    } else {
        serde_json::from_slice(body).map_err(|e| bad(e.to_string()))?
    };
    if let Some(v) = value.get("formatVersion") {
        if v.as_str() != Some(FORMAT_VERSION) {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, "unsupported-version", format!("unsupported version {v}")));
        }
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

fn lookup(state: &AppState, id: &str) -> ApiResult<Arc<StoredMap>> {
    if !store::is_valid_id(id) {
        return Err(ApiError::not_found(id));
    }
    state.store.get(id).ok_or_else(|| ApiError::not_found(id))
}

fn json_bytes(bytes: Vec<u8>, revision: Option<u64>) -> Response {
    let mut resp = ([(header::CONTENT_TYPE, "application/json")], bytes).into_response();
    if let Some(r) = revision {
        resp.headers_mut().insert("x-revision", HeaderValue::from(r));
    }
    resp
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MapRef {
    pub map_id: String,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MapSummary {
    pub map_id: String,
    pub revision: u64,
    pub name: String,
    pub factors: usize,
}

fn decode_map(body: &[u8]) -> ApiResult<sedmap_core::CognitiveMap> {
    load_map(body).map_err(|e| Failure::from(e).into())
}

async fn create_map(State(state): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let map = decode_map(&body)?;
    let stored = state.store.create(map)?;
    Ok((StatusCode::CREATED, Json(MapRef { map_id: stored.id.clone(), revision: stored.revision })).into_response())
}

async fn list_maps(State(state): State<Shared>) -> Json<Vec<MapSummary>> {
    Json(
        state
            .store
            .list()
            .iter()
            .map(|m| MapSummary {
                map_id: m.id.clone(),
                revision: m.revision,
                name: m.map.metadata().name.clone(),
                factors: m.map.len(),
            })
            .collect(),
    )
}

async fn get_map(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let stored = lookup(&state, &id)?;
    Ok(json_bytes(stored.document.clone(), Some(stored.revision)))
}

async fn put_map(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<MapRef>> {
    lookup(&state, &id)?;
    let map = decode_map(&body)?;
    let stored = state.store.put(&id, map)?;
    Ok(Json(MapRef { map_id: stored.id.clone(), revision: stored.revision }))
}

async fn delete_map(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if store::is_valid_id(&id) {
        state.store.delete(&id)?;
    }
    Ok(StatusCode::NO_CONTENT)
}

async fn registry(State(state): State<Shared>) -> Response {
    json_bytes(state.registry.clone(), None)
}

macro_rules! engine_route {
    ($name:ident, $req:ty, $call:path) => {
        async fn $name(State(state): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
            let stored = lookup(&state, &id)?;
            let req: $req = parse_body(&body)?;
            let doc = $call(&stored.map, &req)?;
            Ok(Json(doc).into_response())
        }
    };
}

engine_route!(simulate, api::SimulateRequest, api::run_simulate);
engine_route!(analyze, api::AnalyzeRequest, api::run_analyze);
engine_route!(stabilize, api::StabilizeRequest, api::run_stabilize);
engine_route!(scenario_run, api::RunRequest, api::run_run);
engine_route!(scenario_compare, api::CompareRequest, api::run_compare);
engine_route!(scenario_invert, api::InvertRequest, api::run_invert);
