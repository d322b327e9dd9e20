//! HTTP + JSON front end for live judging.
//!
//! | Method | Path | |
//! |---|---|---|
//! | `POST` | `/experiments` | create an experiment |
//! | `POST` | `/experiments/{id}/sessions` | deal a session for a judge |
//! | `GET` | `/sessions/{id}/next` | session progress and next pair |
//! | `POST` | `/sessions/{id}/judgements` | record a judgement |
//! | `GET` | `/experiments/{id}/leaderboard` | Elo and BT scores (`?format=csv` for the table) |
//! | `GET` | `/experiments/{id}/coverage` | pair coverage and win grids |
//! | `GET` | `/health` | liveness |

mod error;
pub mod leaderboard;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cjrank_core::rating::RatingConfig;
use cjrank_core::store::{Experiment, Item, NewExperiment, SessionState, Store};
use cjrank_core::ItemId;
use serde::{Deserialize, Serialize};

pub use error::ApiError;
pub use leaderboard::{build_coverage, build_leaderboard, Leaderboard, LeaderboardBody, LeaderboardCache};

/// Feedback longer than this many bytes is rejected.
pub const MAX_FEEDBACK_BYTES: usize = 64 * 1024;

pub struct AppState {
    pub store: Store,
    pub leaderboards: LeaderboardCache,
}

impl AppState {
    pub fn new(store: Store) -> Arc<Self> {
        Arc::new(Self {
            store,
            leaderboards: LeaderboardCache::default(),
        })
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/experiments", post(create_experiment))
        .route("/experiments/{id}/sessions", post(open_session))
        .route("/experiments/{id}/leaderboard", get(leaderboard))
        .route("/experiments/{id}/coverage", get(coverage))
        .route("/sessions/{id}/next", get(next_pair))
        .route("/sessions/{id}/judgements", post(submit_judgement))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(?addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Runs store work off the async executor; appends fsync.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> cjrank_core::Result<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

fn json_body<T>(body: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    body.map(|Json(v)| v).map_err(|rej| {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", rej.body_text())
    })
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateExperimentRequest {
    pub items: Vec<Item>,
    #[serde(default)]
    pub config: RatingConfig,
    #[serde(default)]
    pub experiment_id: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentCreated {
    pub experiment_id: String,
    pub items: usize,
    pub pairs_per_session: usize,
}

async fn create_experiment(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateExperimentRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ExperimentCreated>)> {
    let req = json_body(body)?;
    let st = state.clone();
    let exp = blocking(move || {
        st.store.create_experiment(NewExperiment {
            items: req.items,
            config: req.config,
            experiment_id: req.experiment_id,
            seed: req.seed,
        })
    })
    .await?;
    Ok((
        StatusCode::CREATED,
        Json(ExperimentCreated {
            experiment_id: exp.id().to_string(),
            items: exp.index().len(),
            pairs_per_session: exp.index().len() / 2,
        }),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ItemView {
    pub item_id: ItemId,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PairView {
    pub pair_index: usize,
    pub left: ItemView,
    pub right: ItemView,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SessionView {
    pub session_id: String,
    pub experiment_id: String,
    pub judge_id: String,
    pub total_pairs: usize,
    pub judged: usize,
    pub complete: bool,
    /// Null once complete.
    pub next: Option<PairView>,
}

fn session_view(exp: &Experiment, session: &SessionState) -> SessionView {
    let item = |id: ItemId| ItemView {
        item_id: id,
        content: exp
            .manifest()
            .items
            .iter()
            .find(|i| i.item_id == id)
            .map(|i| i.content.clone())
            .unwrap_or_default(),
    };
    SessionView {
        session_id: session.plan.session_id.clone(),
        experiment_id: exp.id().to_string(),
        judge_id: session.judge.clone(),
        total_pairs: session.plan.len(),
        judged: session.judged_count(),
        complete: session.is_complete(),
        next: session.next_pair().map(|(pair_index, (l, r))| PairView {
            pair_index,
            left: item(l),
            right: item(r),
        }),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSessionRequest {
    pub judge_id: String,
}

async fn open_session(
    State(state): State<Arc<AppState>>,
    Path(experiment_id): Path<String>,
    body: Result<Json<OpenSessionRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let req = json_body(body)?;
    if req.judge_id.trim().is_empty() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_argument",
            "judge_id must be non-empty",
        ));
    }
    let exp = state.store.experiment(&experiment_id)?;
    let e = exp.clone();
    let session = blocking(move || e.open_session(&req.judge_id)).await?;
    Ok((StatusCode::CREATED, Json(session_view(&exp, &session))))
}

async fn next_pair(
    State(state): State<Arc<AppState>>,
    Path(session_id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let exp = state.store.experiment_for_session(&session_id)?;
    let session = exp.session(&session_id)?;
    Ok(Json(session_view(&exp, &session)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgementRequest {
    pub pair_index: usize,
    pub winner: ItemId,
    #[serde(default)]
    pub feedback: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JudgementAccepted {
    pub seq: u64,
    pub session: SessionView,
}

async fn submit_judgement(
    State(state): State<Arc<AppState>>,
    Path(session_id): Path<String>,
    body: Result<Json<JudgementRequest>, JsonRejection>,
) -> ApiResult<Json<JudgementAccepted>> {
    let req = json_body(body)?;
    if req.feedback.as_ref().is_some_and(|f| f.len() > MAX_FEEDBACK_BYTES) {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "feedback_too_long",
            format!("feedback exceeds {MAX_FEEDBACK_BYTES} bytes"),
        ));
    }
    let exp = state.store.experiment_for_session(&session_id)?;
    let (e, sid) = (exp.clone(), session_id.clone());
    let record = blocking(move || e.judge_pair(&sid, req.pair_index, req.winner, req.feedback)).await?;
    state.leaderboards.invalidate(exp.id());
    let session = exp.session(&session_id)?;
    Ok(Json(JudgementAccepted {
        seq: record.seq,
        session: session_view(&exp, &session),
    }))
}

#[derive(Debug, Deserialize)]
pub struct LeaderboardQuery {
    #[serde(default)]
    pub format: Option<String>,
}

async fn leaderboard(
    State(state): State<Arc<AppState>>,
    Path(experiment_id): Path<String>,
    Query(query): Query<LeaderboardQuery>,
) -> ApiResult<Response> {
    let exp = state.store.experiment(&experiment_id)?;
    let st = state.clone();
    let board = blocking(move || st.leaderboards.get_or_build(&exp)).await?;
    match query.format.as_deref() {
        None | Some("json") => Ok(Json(board.body.clone()).into_response()),
        Some("csv") => Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], board.csv.clone()).into_response()),
        Some(other) => Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "bad_request",
            format!("unknown format `{other}`; use json or csv"),
        )),
    }
}

async fn coverage(
    State(state): State<Arc<AppState>>,
    Path(experiment_id): Path<String>,
) -> ApiResult<Json<leaderboard::CoverageBody>> {
    let exp = state.store.experiment(&experiment_id)?;
    Ok(Json(blocking(move || build_coverage(&exp)).await?))
}
