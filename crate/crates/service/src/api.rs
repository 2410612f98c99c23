//! The `/v1` HTTP/JSON surface. Mutations need a bearer token; reads are
//! open. Authority rules live in the engine, not here.

use std::sync::Arc;

use axum::extract::{FromRequest, FromRequestParts, Path, Query, Request, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{NaiveDate, Utc};
use noosphere_core::assess::{closure_histogram, participation_report};
use noosphere_core::autolink::{LinkOptions, TermIndex};
use noosphere_core::export::{compile, serialize, Collection, CompileOptions, Format};
use noosphere_core::notify::InboxFilter;
use noosphere_core::requests::RequestFilter;
use noosphere_core::{
    Channel, Engine, EntryKind, NewEntry, ObjectId, ObjectRef, Owner, ReviewState, Severity, UserId,
};
use serde::{Deserialize, Serialize};

use crate::auth::{Credentials, Sessions};
use crate::config::Config;
use crate::error::ApiError;

pub struct AppState {
    pub engine: Arc<Engine>,
    pub credentials: Credentials,
    pub sessions: Sessions,
    pub config: Config,
    pub collections: Vec<Collection>,
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

/// JSON body whose rejections use the API error shape.
pub struct Body<T>(pub T);

impl<T, S> FromRequest<S> for Body<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let Json(v) = Json::<T>::from_request(req, state).await?;
        Ok(Body(v))
    }
}

/// Query string with the API error shape on rejection.
pub struct Params<T>(pub T);

impl<T, S> FromRequestParts<S> for Params<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        let Query(v) = Query::<T>::from_request_parts(parts, state).await?;
        Ok(Params(v))
    }
}

/// The user behind the request's bearer token.
pub struct Actor(pub UserId);

impl FromRequestParts<Shared> for Actor {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Shared) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or_else(ApiError::unauthenticated)?;
        state
            .sessions
            .resolve(token.trim(), Utc::now())
            .map(Actor)
            .ok_or_else(ApiError::unauthenticated)
    }
}

fn object_ref(key: &str) -> ApiResult<ObjectRef> {
    Ok(ObjectRef::parse_key(key)?)
}

fn object_id(raw: String) -> ApiResult<ObjectId> {
    Ok(ObjectId::new(raw)?)
}

fn created<T: Serialize>(v: T) -> Response {
    (StatusCode::CREATED, Json(v)).into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoginBody {
    pub user: String,
    pub secret: String,
}

async fn login(State(s): State<Shared>, Body(b): Body<LoginBody>) -> ApiResult<Response> {
    let user = UserId::new(b.user).map_err(|_| ApiError::bad_credentials())?;
    // the verifier check runs whether or not the user exists
    let known = s.credentials.check(&user, &b.secret);
    if !known || s.engine.snapshot().user(&user).is_err() {
        return Err(ApiError::bad_credentials());
    }
    Ok(Json(s.sessions.issue(&user, Utc::now())).into_response())
}

#[derive(Serialize)]
pub struct EntrySummary {
    pub id: ObjectId,
    pub title: String,
    pub kind: EntryKind,
    pub owner: Owner,
    pub revision: u64,
    pub review_state: ReviewState,
    pub open_corrections: usize,
    pub score: u8,
}

fn summaries<'a>(s: &AppState, entries: impl IntoIterator<Item = &'a noosphere_core::Entry>) -> Vec<EntrySummary> {
    let state = s.engine.snapshot();
    entries
        .into_iter()
        .map(|e| {
            let open = state.open_correction_count(&e.id);
            EntrySummary {
                id: e.id.clone(),
                title: e.title.clone(),
                kind: e.kind,
                owner: e.owner.clone(),
                revision: e.revision,
                review_state: e.review_state,
                open_corrections: open,
                score: noosphere_core::assess::score_entry(e, open, &s.config.rubric).score,
            }
        })
        .collect()
}

async fn list_entries(State(s): State<Shared>) -> Json<Vec<EntrySummary>> {
    let state = s.engine.snapshot();
    Json(summaries(&s, state.entries()))
}

async fn list_orphans(State(s): State<Shared>) -> Json<Vec<EntrySummary>> {
    let state = s.engine.snapshot();
    Json(summaries(&s, state.orphans()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewEntryBody {
    pub title: String,
    pub kind: EntryKind,
    pub content: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

async fn create_entry(State(s): State<Shared>, Actor(a): Actor, Body(b): Body<NewEntryBody>) -> ApiResult<Response> {
    let new = NewEntry::new(b.title, b.kind, b.content).with_synonyms(b.synonyms);
    Ok(created(s.engine.create_entry(&a, new)?))
}

async fn get_entry(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = object_id(id)?;
    let state = s.engine.snapshot();
    let index = TermIndex::from_state(&state);
    Ok(Json(state.entry_view(&id, &index, LinkOptions::default())?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviseBody {
    pub content: String,
    pub expected_revision: Option<u64>,
}

async fn revise_entry(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<ReviseBody>,
) -> ApiResult<Response> {
    let id = object_id(id)?;
    Ok(Json(s.engine.revise_entry(&a, &id, b.content, b.expected_revision)?).into_response())
}

async fn orphan_entry(State(s): State<Shared>, Actor(a): Actor, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(s.engine.orphan_entry(&a, &object_id(id)?)?).into_response())
}

async fn adopt_entry(State(s): State<Shared>, Actor(a): Actor, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(s.engine.adopt_entry(&a, &object_id(id)?)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferBody {
    pub recipient: String,
}

async fn transfer_entry(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<TransferBody>,
) -> ApiResult<Response> {
    let to = UserId::new(b.recipient)?;
    Ok(Json(s.engine.transfer_entry(&a, &object_id(id)?, &to)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewBody {
    pub state: ReviewState,
}

async fn review_entry(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<ReviewBody>,
) -> ApiResult<Response> {
    Ok(Json(s.engine.set_review_state(&a, &object_id(id)?, b.state)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionBody {
    pub text: String,
    pub severity: Severity,
}

async fn file_correction(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<CorrectionBody>,
) -> ApiResult<Response> {
    Ok(created(s.engine.file_correction(&a, &object_id(id)?, b.text, b.severity)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolveBody {
    pub action: String,
    pub note: String,
}

async fn resolve_correction(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<ResolveBody>,
) -> ApiResult<Response> {
    Ok(Json(s.engine.resolve_correction(&a, &object_id(id)?, b.action, b.note)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterQuery<F> {
    pub filter: Option<F>,
}

async fn list_requests(
    State(s): State<Shared>,
    Params(q): Params<FilterQuery<RequestFilter>>,
) -> Json<Vec<noosphere_core::Request>> {
    let state = s.engine.snapshot();
    Json(state.list_requests(q.filter.unwrap_or_default()).into_iter().cloned().collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestBody {
    pub title: String,
    #[serde(default)]
    pub description: String,
}

async fn create_request(State(s): State<Shared>, Actor(a): Actor, Body(b): Body<RequestBody>) -> ApiResult<Response> {
    Ok(created(s.engine.create_request(&a, b.title, b.description)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FulfillBody {
    pub entry: String,
}

async fn fulfill_request(
    State(s): State<Shared>,
    Actor(a): Actor,
    Path(id): Path<String>,
    Body(b): Body<FulfillBody>,
) -> ApiResult<Response> {
    let entry = object_id(b.entry)?;
    Ok(Json(s.engine.fulfill_request(&a, &object_id(id)?, &entry)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageBody {
    /// `kind:id`, e.g. `entry:e12` or `message:m40` for a reply.
    pub target: String,
    pub subject: Option<String>,
    pub body: String,
}

async fn post_message(State(s): State<Shared>, Actor(a): Actor, Body(b): Body<MessageBody>) -> ApiResult<Response> {
    let target = object_ref(&b.target)?;
    Ok(created(s.engine.post_message(&a, &target, b.subject, b.body)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorQuery {
    pub anchor: String,
}

async fn threads(State(s): State<Shared>, Params(q): Params<AnchorQuery>) -> ApiResult<Response> {
    let anchor = object_ref(&q.anchor)?;
    Ok(Json(s.engine.snapshot().thread(&anchor)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatchBody {
    pub object: String,
    pub channels: Vec<Channel>,
}

async fn put_watch(State(s): State<Shared>, Actor(a): Actor, Body(b): Body<WatchBody>) -> ApiResult<Response> {
    let object = object_ref(&b.object)?;
    Ok(Json(s.engine.add_watch(&a, &object, b.channels)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectQuery {
    pub object: String,
}

async fn delete_watch(State(s): State<Shared>, Actor(a): Actor, Params(q): Params<ObjectQuery>) -> ApiResult<Response> {
    s.engine.remove_watch(&a, &object_ref(&q.object)?)?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn inbox(State(s): State<Shared>, Actor(a): Actor, Params(q): Params<FilterQuery<InboxFilter>>) -> ApiResult<Response> {
    Ok(Json(s.engine.inbox(&a, q.filter.unwrap_or_default())?).into_response())
}

async fn read_notice(State(s): State<Shared>, Actor(a): Actor, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(s.engine.mark_read(&a, &object_id(id)?)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormatQuery {
    pub format: Option<String>,
}

async fn participation(State(s): State<Shared>, Params(q): Params<FormatQuery>) -> ApiResult<Response> {
    let report = participation_report(&s.engine.snapshot(), &s.config.rubric);
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(report).into_response()),
        Some("tsv") => Ok(text("text/tab-separated-values", report.to_delimited('\t'))),
        Some(other) => Err(noosphere_core::EngineError::UnsupportedFormat(other.to_string()).into()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosuresQuery {
    pub from: NaiveDate,
    pub to: NaiveDate,
    /// Overrides the configured report offset, e.g. `+10:00`.
    pub tz: Option<String>,
}

async fn closures(State(s): State<Shared>, Params(q): Params<ClosuresQuery>) -> ApiResult<Response> {
    let tz = match q.tz {
        Some(raw) => raw
            .parse()
            .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "invalid-query", format!("bad offset {raw:?}")))?,
        None => s.config.tz().expect("validated"),
    };
    let h = s.engine.with_records(|r| closure_histogram(r, q.from, q.to, tz))?;
    Ok(Json(h).into_response())
}

fn text(content_type: &'static str, body: impl Into<String>) -> Response {
    ([(header::CONTENT_TYPE, content_type)], body.into()).into_response()
}

fn export(s: &AppState, format: Format) -> ApiResult<String> {
    let opts = CompileOptions {
        front: s.config.export.front.clone(),
        rubric: s.config.rubric,
        link: LinkOptions::default(),
    };
    let doc = compile(&s.engine.snapshot(), &s.collections, &opts)?;
    Ok(String::from_utf8(serialize(&doc, format)).expect("serializers emit UTF-8"))
}

async fn export_tex(State(s): State<Shared>) -> ApiResult<Response> {
    Ok(text("application/x-tex; charset=utf-8", export(&s, Format::Latex)?))
}

async fn export_toc(State(s): State<Shared>) -> ApiResult<Response> {
    Ok(text("text/plain; charset=utf-8", export(&s, Format::TocText)?))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "no-route", "no such endpoint")
}

pub fn router(state: Shared) -> Router {
    let v1 = Router::new()
        .route("/login", post(login))
        .route("/entries", get(list_entries).post(create_entry))
        .route("/entries/{id}", get(get_entry).put(revise_entry))
        .route("/entries/{id}/orphan", post(orphan_entry))
        .route("/entries/{id}/adopt", post(adopt_entry))
        .route("/entries/{id}/transfer", post(transfer_entry))
        .route("/entries/{id}/review", post(review_entry))
        .route("/entries/{id}/corrections", post(file_correction))
        .route("/orphans", get(list_orphans))
        .route("/corrections/{id}/resolve", post(resolve_correction))
        .route("/requests", get(list_requests).post(create_request))
        .route("/requests/{id}/fulfill", post(fulfill_request))
        .route("/messages", post(post_message))
        .route("/threads", get(threads))
        .route("/watches", put(put_watch).delete(delete_watch))
        .route("/inbox", get(inbox))
        .route("/notices/{id}/read", post(read_notice))
        .route("/reports/participation", get(participation))
        .route("/reports/closures", get(closures))
        .route("/export/notes.tex", get(export_tex))
        .route("/export/toc", get(export_toc));
    Router::new().nest("/v1", v1).fallback(not_found).with_state(state)
}
