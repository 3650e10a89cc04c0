//! HTTP + JSON front end for [`SessionManager`].
//!
//! | method | path | success |
//! |---|---|---|
//! | POST | `/sessions` | 201 `{v, id, state}` |
//! | POST | `/sessions/{id}/act` | 200 `{v, agent_action, team_action, observed_reward, state}` |
//! | GET | `/sessions/{id}` | 200 `{v, state}` |
//! | GET | `/sessions/{id}/trace` | 200 `{v, trace}` |
//! | DELETE | `/sessions/{id}` | 200 `{v, summary}` |
//!
//! Errors are `{v, code, message}` with 400 for bad input, 404 for an unknown
//! session, 409 for a stale sequence number and 410 once the budget is spent.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use coop_bandit::session::{SessionManager, SessionRequest, SESSION_FORMAT_VERSION};
use coop_bandit::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const V: u32 = SESSION_FORMAT_VERSION;

/// Body of `POST /sessions/{id}/act`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActRequest {
    pub action: usize,
    pub seq: u64,
}

/// An error response.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: String) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_request",
            message,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::StaleSequence { .. } => (StatusCode::CONFLICT, "stale_sequence"),
            Error::BudgetExhausted => (StatusCode::GONE, "budget_exhausted"),
            Error::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            Error::ActionOutOfRange { .. } => (StatusCode::BAD_REQUEST, "action_out_of_range"),
            Error::Io { .. } | Error::Json { .. } | Error::Csv { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
            _ => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        Self {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "v": V, "code": self.code, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

/// Adds `"v"` to a serialized object.
fn versioned(status: StatusCode, value: impl Serialize) -> ApiResult {
    let mut value = serde_json::to_value(value).map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        code: "internal",
        message: e.to_string(),
    })?;
    if let Value::Object(map) = &mut value {
        map.insert("v".into(), V.into());
    }
    Ok((status, Json(value)).into_response())
}

async fn create(State(m): State<Arc<SessionManager>>, body: Result<Json<SessionRequest>, JsonRejection>) -> ApiResult {
    let Json(request) = body?;
    let state = m.create(&request)?;
    versioned(StatusCode::CREATED, json!({ "id": state.id, "state": state }))
}

async fn act(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    body: Result<Json<ActRequest>, JsonRejection>,
) -> ApiResult {
    let Json(ActRequest { action, seq }) = body?;
    versioned(StatusCode::OK, m.act(&id, action, seq)?)
}

async fn state(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult {
    versioned(StatusCode::OK, json!({ "state": m.state(&id)? }))
}

async fn trace(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult {
    versioned(StatusCode::OK, json!({ "trace": m.trace(&id)? }))
}

async fn close(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult {
    versioned(StatusCode::OK, json!({ "summary": m.close(&id)? }))
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state).delete(close))
        .route("/sessions/{id}/act", post(act))
        .route("/sessions/{id}/trace", get(trace))
        .with_state(manager)
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, manager: Arc<SessionManager>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(manager))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
