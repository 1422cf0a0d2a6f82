//! HTTP facade: scenario sessions that can be extended, reasoned over,
//! explained and probed with what-if overrides.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/reason` | scenario text |
//! | POST | `/sessions` | scenario text |
//! | GET | `/sessions/{id}/kb?offset&limit&saturated` | |
//! | POST | `/sessions/{id}/assert?version` | one directive line |
//! | POST | `/sessions/{id}/reason?trace` | |
//! | GET | `/sessions/{id}/explain?fact` | |
//! | POST | `/sessions/{id}/whatif` | `{"set": ["s.p=v"], "trace": false}` |
//! | DELETE | `/sessions/{id}` | |

mod error;

use std::collections::hash_map::RandomState;
use std::collections::HashMap;
use std::hash::{BuildHasher, Hasher};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::time::Instant;

use cdaimo_core::reasoner::explain;
use cdaimo_core::report::{to_canonical_json, write_report, Format};
use cdaimo_core::scenario::{dump_kb, load_doc, parse_directive, parse_scenario, LoadResult, LoadWarning, Override, ScenarioDoc};
use cdaimo_core::{assess, assess_loaded};

pub use error::ApiError;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);
const DEFAULT_PAGE: usize = 200;

struct Session {
    doc: ScenarioDoc,
    load: LoadResult,
    /// Directives added through `assert`, in order.
    overlay: Vec<String>,
    version: u64,
    last_used: Instant,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>>,
    idle_timeout: Duration,
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT)
    }
}

impl AppState {
    pub fn new(idle_timeout: Duration) -> Self {
        AppState { sessions: Arc::default(), idle_timeout }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the timeout. Sessions in use are
    /// kept.
    pub fn sweep(&self) {
        let now = Instant::now();
        self.sessions.lock().unwrap().retain(|_, s| match s.try_lock() {
            Ok(s) => now.duration_since(s.last_used) <= self.idle_timeout,
            Err(_) => true,
        });
    }

    fn insert(&self, session: Session) -> String {
        let mut map = self.sessions.lock().unwrap();
        let id = loop {
            let mut h = RandomState::new().build_hasher();
            h.write_usize(map.len());
            let id = format!("{:016x}", h.finish());
            if !map.contains_key(&id) {
                break id;
            }
        };
        map.insert(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
        id
    }

    fn get(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        self.sweep();
        self.sessions.lock().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found(&format!("no session `{id}`")))
    }

    fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }
}

/// Runs `f` on the session with exclusive access. A session already busy
/// with another request answers 409 rather than queueing.
async fn with_session<T>(state: &AppState, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
    let cell = state.get(id)?;
    let mut session = cell.try_lock().map_err(|_| ApiError::conflict("session_busy", "session is handling another request"))?;
    session.last_used = Instant::now();
    f(&mut session)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/reason", post(reason_text))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", delete(delete_session))
        .route("/sessions/{id}/kb", get(get_kb))
        .route("/sessions/{id}/assert", post(assert_directive))
        .route("/sessions/{id}/reason", post(reason_session))
        .route("/sessions/{id}/explain", get(explain_fact))
        .route("/sessions/{id}/whatif", post(whatif))
        .with_state(state)
}

/// Binds and serves until the process ends, sweeping idle sessions once a
/// minute.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let state = AppState::default();
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

fn canonical(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

/// The machine report for a scenario, byte for byte what the command line
/// prints with `--format json`.
pub fn machine_report(text: &str, trace: bool) -> Result<String, ApiError> {
    Ok(write_report(&assess(text, trace)?.report, Format::Machine, false))
}

#[derive(Debug, Default, Deserialize)]
struct TraceQuery {
    #[serde(default)]
    trace: bool,
}

async fn reason_text(Query(q): Query<TraceQuery>, body: String) -> Result<Response, ApiError> {
    Ok(canonical(machine_report(&body, q.trace)?))
}

#[derive(Serialize)]
struct Created {
    session_id: String,
    scenario: String,
    version: u64,
    warnings: Vec<LoadWarning>,
}

async fn create_session(State(state): State<AppState>, body: String) -> Result<Response, ApiError> {
    state.sweep();
    let doc = parse_scenario(&body)?;
    let load = load_doc(&doc)?;
    let warnings = load.warnings.clone();
    let scenario = load.id.clone();
    let session = Session { doc, load, overlay: Vec::new(), version: 0, last_used: Instant::now() };
    let session_id = state.insert(session);
    Ok((StatusCode::CREATED, Json(Created { session_id, scenario, version: 0, warnings })).into_response())
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if state.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(&format!("no session `{id}`")))
    }
}

#[derive(Debug, Deserialize)]
struct KbQuery {
    #[serde(default)]
    offset: usize,
    limit: Option<usize>,
    #[serde(default)]
    saturated: bool,
}

#[derive(Serialize)]
struct KbPage {
    version: u64,
    total: usize,
    offset: usize,
    limit: usize,
    lines: Vec<String>,
    /// Directives added since the session was created.
    overlay: Vec<String>,
}

async fn get_kb(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<KbQuery>) -> Result<Response, ApiError> {
    with_session(&state, &id, |s| {
        let text = if q.saturated {
            let a = assess_loaded(s.load.clone(), false)?;
            dump_kb(&a.result.kb_after, &s.load.id, &s.load.axioms)
        } else {
            dump_kb(&s.load.kb, &s.load.id, &s.load.axioms)
        };
        let all: Vec<&str> = text.lines().collect();
        let limit = q.limit.unwrap_or(DEFAULT_PAGE);
        let lines = all.iter().skip(q.offset).take(limit).map(|l| l.to_string()).collect();
        let overlay = s.overlay.clone();
        Ok(Json(KbPage { version: s.version, total: all.len(), offset: q.offset, limit, lines, overlay }).into_response())
    })
    .await
}

#[derive(Debug, Deserialize)]
struct AssertQuery {
    /// Version the client last saw. A stale version is rejected.
    version: Option<u64>,
}

#[derive(Serialize)]
struct Asserted {
    version: u64,
    line: u32,
    warnings: Vec<LoadWarning>,
}

async fn assert_directive(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<AssertQuery>,
    body: String,
) -> Result<Response, ApiError> {
    with_session(&state, &id, |s| {
        if let Some(v) = q.version {
            if v != s.version {
                return Err(ApiError::conflict(
                    "version_conflict",
                    format!("session is at version {}, request expected {v}", s.version),
                ));
            }
        }
        let text = body.trim_end_matches(['\r', '\n']);
        let line = s.doc.last_line() + 1;
        let directive = parse_directive(text, line)?;
        let mut doc = s.doc.clone();
        doc.directives.push(directive);
        let load = load_doc(&doc)?;
        s.doc = doc;
        s.load = load;
        s.overlay.push(text.to_string());
        s.version += 1;
        let warnings = s.load.warnings.iter().filter(|w| w.line == Some(line)).cloned().collect();
        Ok(Json(Asserted { version: s.version, line, warnings }).into_response())
    })
    .await
}

async fn reason_session(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<TraceQuery>) -> Result<Response, ApiError> {
    with_session(&state, &id, |s| {
        let a = assess_loaded(s.load.clone(), q.trace)?;
        Ok(canonical(write_report(&a.report, Format::Machine, false)))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct ExplainQuery {
    fact: String,
}

#[derive(Serialize)]
struct Explained {
    fact: String,
    proof: cdaimo_core::reasoner::ProofTree,
    text: String,
}

async fn explain_fact(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<ExplainQuery>) -> Result<Response, ApiError> {
    with_session(&state, &id, |s| {
        let a = assess_loaded(s.load.clone(), false)?;
        let fact = a.result.kb_after.find_fact(&q.fact)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_fact", format!("`{}` does not hold", q.fact)))?;
        let proof = explain(&a.result, &fact).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "reasoning_error", e.to_string()))?;
        let text = proof.render();
        Ok(canonical(to_canonical_json(&Explained { fact: fact.to_string(), proof, text })))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct WhatIfRequest {
    set: Vec<String>,
    #[serde(default)]
    trace: bool,
}

/// Base report, report with `overrides` applied, and their differences, as
/// canonical JSON.
pub fn whatif_report(doc: &ScenarioDoc, overrides: &[Override], trace: bool) -> Result<String, ApiError> {
    Ok(to_canonical_json(&cdaimo_core::whatif(doc, overrides, trace)?))
}

async fn whatif(State(state): State<AppState>, Path(id): Path<String>, body: String) -> Result<Response, ApiError> {
    let req: WhatIfRequest = serde_json::from_str(&body).map_err(|e| ApiError::bad_request(format!("invalid what-if request: {e}")))?;
    let overrides = req
        .set
        .iter()
        .map(|s| s.parse::<Override>())
        .collect::<Result<Vec<_>, _>>()?;
    with_session(&state, &id, |s| Ok(canonical(whatif_report(&s.doc, &overrides, req.trace)?)))
    .await
}
