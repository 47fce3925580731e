//! HTTP/JSON front end: stateless analysis endpoints and in-memory play
//! sessions against the engine.
//!
//! | method | path                  | body                              |
//! |--------|-----------------------|-----------------------------------|
//! | POST   | `/analyze`            | `{k, heaps}`                      |
//! | POST   | `/wythoff/analyze`    | `{heaps: [x, y]}`                 |
//! | POST   | `/sessions`           | `{k, heaps, engine_side}`         |
//! | GET    | `/sessions/{id}`      |                                   |
//! | POST   | `/sessions/{id}/move` | `{move, ply?}`                    |
//! | GET    | `/health`             |                                   |

pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use heapgame_core::position::{DEFAULT_MAX_HEAPS, MIN_HEAPS};
use heapgame_core::wire::{AnalyzeRequest, AnalyzeResponse, WythoffRequest, WythoffResponse};
use heapgame_core::{Error as CoreError, Move};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use crate::session::{EngineSide, MoveRejection, Session};

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone)]
pub struct Config {
    pub bind: SocketAddr,
    pub session_ttl: Duration,
    /// Directory of built web UI assets, served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            session_ttl: DEFAULT_SESSION_TTL,
            static_dir: None,
        }
    }
}

type SharedSession = Arc<Mutex<Session>>;

pub struct AppState {
    sessions: Mutex<HashMap<Uuid, SharedSession>>,
    ttl: Duration,
}

impl AppState {
    pub fn new(ttl: Duration) -> Self {
        Self {
            sessions: Mutex::new(HashMap::new()),
            ttl,
        }
    }

    /// Drops sessions idle for longer than the TTL. Returns how many went.
    pub fn evict_expired(&self, now: Instant) -> usize {
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, s| {
            // A session locked by a request in flight is in use.
            s.try_lock()
                .map(|s| now.saturating_duration_since(s.touched) <= self.ttl)
                .unwrap_or(true)
        });
        before - sessions.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn insert(&self, session: Session) -> SharedSession {
        let shared = Arc::new(Mutex::new(session));
        let id = shared.lock().unwrap().id();
        self.sessions.lock().unwrap().insert(id, shared.clone());
        shared
    }

    fn get(&self, id: &str) -> Result<SharedSession, ApiError> {
        self.evict_expired(Instant::now());
        let id = Uuid::parse_str(id).map_err(|_| ApiError::not_found(id))?;
        self.sessions
            .lock()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(&id.to_string()))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    rule: Option<&'static str>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            rule: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("no session {id}"))
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let rule = match &e {
            CoreError::IllegalMove(m) => Some(m.rule()),
            _ => None,
        };
        let status = match e {
            CoreError::Parse(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self {
            status,
            message: e.to_string(),
            rule,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(rule) = self.rule {
            body["rule"] = json!(rule);
        }
        (self.status, Json(body)).into_response()
    }
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

/// Checks `k` and the heap count of a k-heap request.
fn check_shape(k: usize, heaps: &[u64]) -> Result<(), ApiError> {
    if k < MIN_HEAPS {
        return Err(ApiError::unprocessable(format!(
            "the game needs k >= {MIN_HEAPS}; for two heaps use POST /wythoff/analyze"
        )));
    }
    if k > DEFAULT_MAX_HEAPS {
        return Err(ApiError::unprocessable(format!(
            "k = {k} exceeds the limit of {DEFAULT_MAX_HEAPS}"
        )));
    }
    if heaps.len() != k {
        return Err(ApiError::bad_request(format!(
            "k = {k} but {} heaps were given",
            heaps.len()
        )));
    }
    Ok(())
}

async fn analyze(body: Bytes) -> Result<Json<AnalyzeResponse>, ApiError> {
    let req: AnalyzeRequest = parse(&body)?;
    check_shape(req.k, &req.heaps)?;
    Ok(Json(AnalyzeResponse::for_heaps(&req.heaps)?))
}

async fn wythoff_analyze(body: Bytes) -> Result<Json<WythoffResponse>, ApiError> {
    let req: WythoffRequest = parse(&body)?;
    match req.heaps[..] {
        [x, y] => Ok(Json(WythoffResponse::for_heaps(x, y))),
        _ => Err(ApiError::bad_request(
            "Wythoff's game has exactly two heaps",
        )),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateSession {
    pub k: usize,
    pub heaps: Vec<u64>,
    #[serde(default = "default_side")]
    pub engine_side: EngineSide,
}

fn default_side() -> EngineSide {
    EngineSide::Second
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub mv: Move,
    /// The `ply` the client last saw; a mismatch is answered with 409.
    #[serde(default)]
    pub ply: Option<usize>,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSession = parse(&body)?;
    check_shape(req.k, &req.heaps)?;
    // Validates the total against overflow.
    heapgame_core::normalize(&req.heaps)?;
    state.evict_expired(Instant::now());
    let shared = state.insert(Session::start(req.heaps, req.engine_side));
    let view = shared.lock().unwrap().view();
    tracing::debug!(id = %view.id, "session created");
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let shared = state.get(&id)?;
    let mut session = shared.lock().unwrap();
    session.touched = Instant::now();
    Ok(Json(session.view()))
}

async fn play_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let shared = state.get(&id)?;
    let req: MoveRequest = parse(&body)?;
    let mut session = shared.lock().unwrap();
    session.touched = Instant::now();
    match session.play(&req.mv, req.ply) {
        Ok(()) => Ok(Json(session.view())),
        Err(MoveRejection::Finished) => {
            Err(ApiError::new(StatusCode::CONFLICT, "the game is finished"))
        }
        Err(MoveRejection::StalePly { expected, got }) => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("move out of turn: session is at ply {expected}, request was for ply {got}"),
        )),
        Err(MoveRejection::Illegal(rule)) => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            rule: Some(rule.rule()),
            message: rule.to_string(),
        }),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/analyze", post(analyze))
        .route("/wythoff/analyze", post(wythoff_analyze))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/move", post(play_move))
        .route("/health", get(health))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

/// Runs the server until Ctrl-C.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(config.session_ttl));
    let sweeper = state.clone();
    let period = config
        .session_ttl
        .min(Duration::from_secs(60))
        .max(Duration::from_secs(1));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            sweeper.evict_expired(Instant::now());
        }
    });
    let app = router(state, config.static_dir);
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
