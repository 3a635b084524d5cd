//! HTTP API over a single session.
//!
//! Reads clone the current snapshot and never wait on a mutation.
//! Mutations are serialized behind one writer lock, applied to a copy and
//! published only on success. The session revision is the concurrency
//! token: it is sent as `ETag`, and a mutation carrying a stale
//! `If-Match` is refused with 409.

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::Router;
use serde::Deserialize;
use tokio::sync::Mutex;

use lambda_sseq::chart::page_chart;
use lambda_sseq::session::SessionFile;
use lambda_sseq::ss::{Session, SignMode, SsError};
use lambda_sseq::Element;

use crate::report::{error_kind, to_json, AssertionCreated, ClassReport, ErrorBody, PropagationReport};

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Shared>,
}

struct Shared {
    snapshot: RwLock<Option<Arc<Session>>>,
    writer: Mutex<()>,
    path: Option<PathBuf>,
}

impl AppState {
    pub fn empty() -> Self {
        Self::build(None, None)
    }

    /// Serve `session`; when `path` is given every mutation is saved there.
    pub fn with_session(session: Session, path: Option<PathBuf>) -> Self {
        Self::build(Some(session), path)
    }

    fn build(session: Option<Session>, path: Option<PathBuf>) -> Self {
        AppState {
            inner: Arc::new(Shared {
                snapshot: RwLock::new(session.map(Arc::new)),
                writer: Mutex::new(()),
                path,
            }),
        }
    }

    fn current(&self) -> Option<Arc<Session>> {
        self.inner.snapshot.read().expect("snapshot lock").clone()
    }

    fn publish(&self, s: Session) -> Result<(), ApiError> {
        if let Some(path) = &self.inner.path {
            SessionFile::from_session(&s)
                .save(path)
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Io", e.to_string()))?;
        }
        *self.inner.snapshot.write().expect("snapshot lock") = Some(Arc::new(s));
        Ok(())
    }

    /// Run a mutation on a private copy of the session under the writer
    /// lock, and publish the copy if it succeeds.
    async fn mutate<T>(
        &self,
        headers: &HeaderMap,
        f: impl FnOnce(&mut Session) -> Result<T, ApiError>,
    ) -> Result<(T, u64), ApiError> {
        let _guard = self.inner.writer.lock().await;
        let mut s = (*self.current().ok_or_else(ApiError::no_session)?).clone();
        check_token(headers, s.revision())?;
        let before = s.revision();
        let value = f(&mut s)?;
        let revision = s.revision();
        if revision != before {
            self.publish(s)?;
        }
        Ok((value, revision))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody { error: kind.to_string(), message: message.into() },
        }
    }

    fn no_session() -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "NoSession", "no session is loaded; PUT /api/session first")
    }

    fn bad_input(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadInput", message)
    }
}

impl From<SsError> for ApiError {
    fn from(e: SsError) -> Self {
        let status = match &e {
            SsError::DSquaredViolation(_) | SsError::ConflictingAssertion(_) | SsError::PropagationConflict(_) => {
                StatusCode::CONFLICT
            }
            SsError::UnknownAssertion(_) => StatusCode::NOT_FOUND,
            SsError::Linalg(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, error_kind(&e), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, json_headers(None), to_json(&self.body)).into_response()
    }
}

fn json_headers(revision: Option<u64>) -> HeaderMap {
    let mut h = HeaderMap::new();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    if let Some(r) = revision {
        h.insert(header::ETAG, HeaderValue::from_str(&format!("\"{r}\"")).expect("ascii"));
    }
    h
}

fn json_ok(status: StatusCode, revision: u64, body: String) -> Response {
    (status, json_headers(Some(revision)), body).into_response()
}

fn check_token(headers: &HeaderMap, revision: u64) -> Result<(), ApiError> {
    let Some(v) = headers.get(header::IF_MATCH) else {
        return Ok(());
    };
    let text = v.to_str().map_err(|_| ApiError::bad_input("If-Match is not ASCII"))?.trim();
    if text == "*" {
        return Ok(());
    }
    let token = text.trim_start_matches("W/").trim_matches('"');
    let want: u64 = token.parse().map_err(|_| ApiError::bad_input(format!("bad If-Match token {text}")))?;
    if want != revision {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "StaleRevision",
            format!("session is at revision {revision}, request was made against {want}"),
        ));
    }
    Ok(())
}

fn element(text: &str, s: &Session) -> Result<Element, ApiError> {
    Element::parse(text, s.ctx()).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "LambdaError", e.to_string()))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/session", get(get_session).put(put_session))
        .route("/api/page", get(get_page))
        .route("/api/assertions", post(post_assertion))
        .route("/api/assertions/{id}", delete(delete_assertion))
        .route("/api/propagate", post(post_propagate))
        .route("/api/compose", get(get_compose))
        .with_state(state)
}

pub async fn serve(state: AppState, host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

async fn get_session(State(st): State<AppState>) -> Result<Response, ApiError> {
    let s = st.current().ok_or_else(ApiError::no_session)?;
    Ok(json_ok(StatusCode::OK, s.revision(), SessionFile::from_session(&s).to_json()))
}

async fn put_session(State(st): State<AppState>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let _guard = st.inner.writer.lock().await;
    if let Some(current) = st.current() {
        check_token(&headers, current.revision())?;
    }
    let file = SessionFile::parse(&body).map_err(|e| ApiError::bad_input(e.to_string()))?;
    let s = file.to_session().map_err(|e| ApiError::bad_input(e.to_string()))?;
    let revision = s.revision();
    let text = SessionFile::from_session(&s).to_json();
    st.publish(s)?;
    Ok(json_ok(StatusCode::OK, revision, text))
}

#[derive(Deserialize)]
struct PageQuery {
    sphere: u32,
    r: u32,
}

async fn get_page(State(st): State<AppState>, Query(q): Query<PageQuery>) -> Result<Response, ApiError> {
    let snap = st.current().ok_or_else(ApiError::no_session)?;
    let mut s = (*snap).clone();
    let page = page_chart(&mut s, q.sphere, q.r)?;
    Ok(json_ok(StatusCode::OK, s.revision(), to_json(&page)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewAssertion {
    sphere: u32,
    page: u32,
    source: String,
    target: String,
    #[serde(default)]
    note: String,
}

async fn post_assertion(State(st): State<AppState>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let a: NewAssertion = serde_json::from_str(&body).map_err(|e| ApiError::bad_input(e.to_string()))?;
    let (id, revision) = st
        .mutate(&headers, |s| {
            let (x, y) = (element(&a.source, s)?, element(&a.target, s)?);
            Ok(s.assert_differential(a.sphere, a.page, &x, &y, &a.note)?)
        })
        .await?;
    Ok(json_ok(StatusCode::CREATED, revision, to_json(&AssertionCreated { id, revision })))
}

async fn delete_assertion(State(st): State<AppState>, headers: HeaderMap, Path(id): Path<u64>) -> Result<Response, ApiError> {
    let ((), revision) = st.mutate(&headers, |s| Ok(s.delete_assertion(id)?)).await?;
    Ok(json_ok(StatusCode::OK, revision, format!("{{\"revision\": {revision}}}\n")))
}

#[derive(Deserialize)]
struct PropagateQuery {
    sphere: u32,
    r: u32,
    sign_mode: Option<SignMode>,
}

async fn post_propagate(State(st): State<AppState>, headers: HeaderMap, Query(q): Query<PropagateQuery>) -> Result<Response, ApiError> {
    let (prop, revision) = st.mutate(&headers, |s| Ok(s.leibniz_propagate(q.sphere, q.r, q.sign_mode)?)).await?;
    Ok(json_ok(StatusCode::OK, revision, to_json(&PropagationReport::new(&prop, revision))))
}

#[derive(Deserialize)]
struct ComposeQuery {
    r: u32,
    a_sphere: u32,
    a: String,
    b_sphere: u32,
    b: String,
}

async fn get_compose(State(st): State<AppState>, Query(q): Query<ComposeQuery>) -> Result<Response, ApiError> {
    let snap = st.current().ok_or_else(ApiError::no_session)?;
    let mut s = (*snap).clone();
    let (x, y) = (element(&q.a, &s)?, element(&q.b, &s)?);
    let ca = s.class(q.a_sphere, q.r, &x)?;
    let cb = s.class(q.b_sphere, q.r, &y)?;
    let ab = s.compose_classes(&ca, &cb)?;
    Ok(json_ok(StatusCode::OK, s.revision(), to_json(&ClassReport::from(&ab))))
}
