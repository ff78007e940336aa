//! HTTP API for human-steered simulation.
//!
//! `GET /api/world`, `GET /api/state`, `GET /api/legal-moves`,
//! `POST /api/move {"to": cell}`, `POST /api/reset`,
//! `POST /api/mode {"adversary": "interactive|random|greedy"}`.
//! Errors are `{"code": ..., "message": ...}`.

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::services::ServeDir;
use vigil_core::document::WorldDocument;
use vigil_core::runtime::{
    trace_record, Adversary, AdversaryPolicy, Composition, CompositionMode, RuntimeError, SimulationState,
    TraceRecord,
};
use vigil_core::Loc;

/// One game loop: the composition, its current state and the target policy.
pub struct Session {
    comp: Composition,
    sim: SimulationState,
    adversary: Adversary,
    seed: u64,
}

impl Session {
    pub fn new(comp: Composition, seed: u64) -> Self {
        let sim = comp.initial_state();
        Session { comp, sim, adversary: Adversary::new(AdversaryPolicy::Interactive, seed), seed }
    }

    pub fn payload(&self) -> StatePayload {
        StatePayload {
            record: trace_record(self.comp.world(), &self.sim),
            adversary: self.adversary.policy(),
            mode: self.comp.mode(),
            legal_moves: self.legal_moves(),
        }
    }

    fn legal_moves(&self) -> Vec<i32> {
        self.comp.legal_moves(&self.sim).iter().map(|l| l.raw()).collect()
    }

    /// Applies `to`, or the adversary's choice when `to` is absent.
    pub fn advance(&mut self, to: Option<i32>) -> Result<(), ApiError> {
        let to = match to {
            Some(raw) => Loc::from_raw(raw).ok_or_else(|| self.illegal(raw))?,
            None => match self.adversary.policy() {
                AdversaryPolicy::Interactive => {
                    return Err(ApiError::bad_request("`to` is required with the interactive adversary"))
                }
                _ => self.adversary.choose(&self.comp, &self.sim).ok_or_else(|| {
                    ApiError::new(StatusCode::CONFLICT, "no_moves", "the target has no legal move")
                })?,
            },
        };
        self.sim = self.comp.step(&self.sim, to).map_err(ApiError::from)?;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.sim = self.comp.initial_state();
        self.adversary = Adversary::new(self.adversary.policy(), self.seed);
    }

    pub fn set_adversary(&mut self, policy: AdversaryPolicy) {
        self.adversary = Adversary::new(policy, self.seed);
    }

    fn illegal(&self, to: i32) -> ApiError {
        RuntimeError::IllegalMove { to, legal: self.legal_moves() }.into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePayload {
    #[serde(flatten)]
    pub record: TraceRecord,
    pub adversary: AdversaryPolicy,
    pub mode: CompositionMode,
    pub legal_moves: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorBody { code: code.into(), message: message.into() } }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<RuntimeError> for ApiError {
    fn from(e: RuntimeError) -> Self {
        match e {
            RuntimeError::IllegalMove { .. } => ApiError::new(StatusCode::CONFLICT, "illegal_move", e.to_string()),
            RuntimeError::StrategyDomain { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "strategy_domain", e.to_string())
            }
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Shared = Arc<RwLock<Session>>;

fn json_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    let text = if body.is_empty() { &b"{}"[..] } else { body };
    serde_json::from_slice(text).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

async fn world(State(s): State<Shared>) -> Json<Value> {
    let session = s.read().expect("session lock");
    let doc = WorldDocument::from_world(session.comp.world());
    Json(serde_json::to_value(doc).expect("world documents serialize"))
}

async fn state(State(s): State<Shared>) -> Json<StatePayload> {
    Json(s.read().expect("session lock").payload())
}

async fn legal_moves(State(s): State<Shared>) -> Json<Value> {
    let session = s.read().expect("session lock");
    Json(serde_json::json!({ "moves": session.legal_moves() }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveRequest {
    to: Option<i32>,
}

async fn make_move(State(s): State<Shared>, body: Bytes) -> Result<Json<StatePayload>, ApiError> {
    let req: MoveRequest = json_body(&body)?;
    let mut session = s.write().expect("session lock");
    session.advance(req.to)?;
    Ok(Json(session.payload()))
}

async fn reset(State(s): State<Shared>) -> Json<StatePayload> {
    let mut session = s.write().expect("session lock");
    session.reset();
    Json(session.payload())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeRequest {
    adversary: String,
}

async fn mode(State(s): State<Shared>, body: Bytes) -> Result<Json<StatePayload>, ApiError> {
    let req: ModeRequest = json_body(&body)?;
    let policy: AdversaryPolicy = req.adversary.parse().map_err(ApiError::bad_request)?;
    let mut session = s.write().expect("session lock");
    session.set_adversary(policy);
    Ok(Json(session.payload()))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

/// The API routes; `assets` (the console build) is served for every other
/// path when given.
pub fn router(session: Session, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/world", get(world))
        .route("/api/state", get(state))
        .route("/api/legal-moves", get(legal_moves))
        .route("/api/move", post(make_move))
        .route("/api/reset", post(reset))
        .route("/api/mode", post(mode))
        .route("/api/{*rest}", get(not_found).post(not_found))
        .with_state(Arc::new(RwLock::new(session)));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

pub async fn serve(session: Session, port: u16, assets: Option<PathBuf>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .map_err(|e| anyhow::anyhow!("cannot listen on port {port}: {e}"))?;
    log::info!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
