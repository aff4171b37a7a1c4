//! HTTP routes over [`Store`].

use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use base64::Engine;
use microar_core::catalog::{AssetRecordWire, CatalogError};
use microar_core::package::{self, PackageError, MEDIA_TYPE};
use microar_core::{canonical, Aabb, StoryId};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::store::{LineageLookupError, PublishError, Store};

/// Header carrying the publishing creator's name.
pub const CREATOR_HEADER: &str = "creator";

const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;
const DEFAULT_SEARCH_LIMIT: usize = 20;
const MAX_SEARCH_LIMIT: usize = 100;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub page_size_cap: usize,
    pub request_log: bool,
}

impl AppState {
    pub fn new(store: Arc<Store>, config: &Config) -> Self {
        Self {
            store,
            page_size_cap: config.page_size_cap,
            request_log: config.request_log,
        }
    }
}

/// Canonical-JSON response with a status code.
fn json_response(status: StatusCode, body: &impl serde::Serialize) -> Response {
    let bytes = canonical::to_vec(body).expect("response bodies serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn error(status: StatusCode, code: &str, message: impl Into<String>, details: Value) -> Response {
    json_response(
        status,
        &json!({"error": {"code": code, "message": message.into(), "details": details}}),
    )
}

fn internal(e: impl std::fmt::Display) -> Response {
    error(
        StatusCode::INTERNAL_SERVER_ERROR,
        "internal",
        e.to_string(),
        Value::Null,
    )
}

#[allow(clippy::result_large_err)]
fn parse_id(raw: &str) -> Result<StoryId, Response> {
    raw.parse().map_err(|_| {
        error(
            StatusCode::BAD_REQUEST,
            "bad_id",
            format!("{raw:?} is not a story id"),
            Value::Null,
        )
    })
}

fn not_found(id: &StoryId) -> Response {
    error(
        StatusCode::NOT_FOUND,
        "not_found",
        format!("story {id} not found"),
        Value::Null,
    )
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> T + Send + 'static,
) -> Result<T, Response> {
    tokio::task::spawn_blocking(f).await.map_err(internal)
}

fn publish_error(e: PublishError) -> Response {
    let msg = e.to_string();
    match e {
        PublishError::Violations(v) => {
            let details: Vec<Value> = v
                .iter()
                .map(|x| json!({"path": x.path, "rule": x.rule.describe()}))
                .collect();
            error(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_story",
                msg,
                Value::Array(details),
            )
        }
        PublishError::Package(PackageError::Invalid(v)) => {
            let details: Vec<Value> = v
                .iter()
                .map(|x| json!({"path": x.path, "rule": x.rule.describe()}))
                .collect();
            error(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_story",
                msg,
                Value::Array(details),
            )
        }
        PublishError::Package(p) => error(
            StatusCode::UNPROCESSABLE_ENTITY,
            p.category(),
            msg,
            Value::Null,
        ),
        PublishError::Draft => error(StatusCode::UNPROCESSABLE_ENTITY, "draft", msg, Value::Null),
        PublishError::NotCanonical => error(
            StatusCode::UNPROCESSABLE_ENTITY,
            "not_canonical",
            msg,
            Value::Null,
        ),
        PublishError::CreatorMismatch { .. } => {
            error(StatusCode::FORBIDDEN, "creator_mismatch", msg, Value::Null)
        }
        PublishError::BrokenLineage(id) => error(
            StatusCode::CONFLICT,
            "broken_lineage",
            msg,
            json!({"parent_story": id}),
        ),
        PublishError::Store(s) => internal(s),
    }
}

/// `POST /stories`: the body is either package bytes or, with a JSON
/// content type, the `{metadata, content, layout}` document which is
/// encoded here.
async fn publish(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let Some(creator) = headers
        .get(CREATOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::to_owned)
    else {
        return error(
            StatusCode::UNAUTHORIZED,
            "missing_creator",
            "a creator header is required",
            Value::Null,
        );
    };
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let bytes = if is_json {
        let doc: Value = match serde_json::from_slice(&body) {
            Ok(v) => v,
            Err(e) => {
                return error(
                    StatusCode::BAD_REQUEST,
                    "bad_json",
                    e.to_string(),
                    Value::Null,
                )
            }
        };
        match package::from_document(doc) {
            Ok(d) if d.draft => return publish_error(PublishError::Draft),
            Ok(d) => match package::encode(&d.story) {
                Ok(b) => b,
                Err(e) => return publish_error(e.into()),
            },
            Err(e) => return publish_error(e.into()),
        }
    } else {
        body.to_vec()
    };
    let store = Arc::clone(&state.store);
    match blocking(move || store.publish(&bytes, &creator)).await {
        Err(r) => r,
        Ok(Err(e)) => publish_error(e),
        Ok(Ok(out)) => {
            let status = if out.created {
                StatusCode::CREATED
            } else {
                StatusCode::OK
            };
            json_response(status, &out)
        }
    }
}

#[derive(Deserialize)]
struct ListQuery {
    page: Option<String>,
    page_size: Option<String>,
    creator: Option<String>,
}

#[allow(clippy::result_large_err)]
fn parse_positive(
    name: &str,
    raw: Option<&str>,
    default: usize,
    max: usize,
) -> Result<usize, Response> {
    let Some(raw) = raw else { return Ok(default) };
    match raw.parse::<usize>() {
        Ok(n) if n >= 1 && n <= max => Ok(n),
        _ => Err(error(
            StatusCode::BAD_REQUEST,
            "bad_query",
            format!("{name} must be an integer in [1, {max}]"),
            Value::Null,
        )),
    }
}

async fn list(State(state): State<AppState>, Query(q): Query<ListQuery>) -> Response {
    let cap = state.page_size_cap;
    let page = match parse_positive("page", q.page.as_deref(), 1, usize::MAX) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let page_size = match parse_positive("page_size", q.page_size.as_deref(), cap.min(20), cap) {
        Ok(p) => p,
        Err(r) => return r,
    };
    json_response(
        StatusCode::OK,
        &state.store.list(page, page_size, q.creator.as_deref()),
    )
}

fn wants_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("application/json"))
}

/// `GET /stories/{id}`: package bytes, or the JSON document form when the
/// client accepts JSON. Either way one view is counted.
async fn fetch(
    State(state): State<AppState>,
    Path(raw): Path<String>,
    headers: HeaderMap,
) -> Response {
    let id = match parse_id(&raw) {
        Ok(id) => id,
        Err(r) => return r,
    };
    let store = Arc::clone(&state.store);
    let found = match blocking(move || store.fetch(&id)).await {
        Err(r) => return r,
        Ok(Err(e)) => return internal(e),
        Ok(Ok(None)) => return not_found(&id),
        Ok(Ok(Some(found))) => found,
    };
    let (bytes, story) = found;
    if wants_json(&headers) {
        let mut doc = match package::to_document(&story) {
            Ok(d) => d,
            Err(e) => return internal(e),
        };
        doc["story_id"] = json!(id);
        return json_response(StatusCode::OK, &doc);
    }
    let mut resp = (StatusCode::OK, bytes.as_ref().clone()).into_response();
    resp.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static(MEDIA_TYPE));
    resp
}

async fn meta(State(state): State<AppState>, Path(raw): Path<String>) -> Response {
    match parse_id(&raw) {
        Err(r) => r,
        Ok(id) => match state.store.meta(&id) {
            Some(l) => json_response(StatusCode::OK, &l),
            None => not_found(&id),
        },
    }
}

async fn lineage(State(state): State<AppState>, Path(raw): Path<String>) -> Response {
    let id = match parse_id(&raw) {
        Ok(id) => id,
        Err(r) => return r,
    };
    match state.store.lineage(&id) {
        Ok(chain) => json_response(StatusCode::OK, &chain),
        Err(LineageLookupError::NotFound(id)) => not_found(&id),
        Err(e @ LineageLookupError::Lineage(_)) => error(
            StatusCode::INTERNAL_SERVER_ERROR,
            "integrity",
            e.to_string(),
            Value::Null,
        ),
    }
}

async fn stats(State(state): State<AppState>) -> Response {
    json_response(StatusCode::OK, &state.store.stats())
}

#[derive(Deserialize)]
struct BoundsBody {
    min_um: [i64; 3],
    max_um: [i64; 3],
}

#[derive(Deserialize)]
struct AssetUpload {
    display_name: String,
    #[serde(default)]
    tags: Vec<String>,
    blob_base64: String,
    bounds: Option<BoundsBody>,
}

fn catalog_error(e: CatalogError) -> Response {
    let msg = e.to_string();
    match e {
        CatalogError::NotFound(_) => error(StatusCode::NOT_FOUND, "not_found", msg, Value::Null),
        CatalogError::EmptyBlob | CatalogError::BadLimit | CatalogError::Model(_) => {
            error(StatusCode::BAD_REQUEST, "bad_asset", msg, Value::Null)
        }
        CatalogError::Integrity(_) | CatalogError::Corrupt { .. } | CatalogError::Io(_) => {
            internal(msg)
        }
    }
}

async fn put_asset(State(state): State<AppState>, body: Bytes) -> Response {
    let upload: AssetUpload = match serde_json::from_slice(&body) {
        Ok(u) => u,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_json",
                e.to_string(),
                Value::Null,
            )
        }
    };
    let blob = match base64::engine::general_purpose::STANDARD.decode(upload.blob_base64.as_bytes())
    {
        Ok(b) => b,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_base64",
                e.to_string(),
                Value::Null,
            )
        }
    };
    let bounds = match upload
        .bounds
        .map(|b| Aabb::from_micros(b.min_um, b.max_um))
        .transpose()
    {
        Ok(b) => b,
        Err(e) => {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_asset",
                e.to_string(),
                Value::Null,
            )
        }
    };
    let store = Arc::clone(&state.store);
    let result = blocking(move || {
        let existed = microar_core::catalog::asset_key_for(&blob);
        let existed = store.catalog().record(&existed).is_some();
        store
            .catalog()
            .put_asset(&blob, &upload.display_name, &upload.tags, bounds)
            .map(|key| (key, !existed))
    })
    .await;
    match result {
        Err(r) => r,
        Ok(Err(e)) => catalog_error(e),
        Ok(Ok((key, created))) => {
            let status = if created {
                StatusCode::CREATED
            } else {
                StatusCode::OK
            };
            json_response(status, &json!({"asset_key": key, "created": created}))
        }
    }
}

async fn get_asset(State(state): State<AppState>, Path(key): Path<String>) -> Response {
    let store = Arc::clone(&state.store);
    match blocking(move || store.catalog().get_asset(&key)).await {
        Err(r) => r,
        Ok(Err(e)) => catalog_error(e),
        Ok(Ok(bytes)) => (
            StatusCode::OK,
            [(header::CONTENT_TYPE, "application/octet-stream")],
            bytes,
        )
            .into_response(),
    }
}

#[derive(Deserialize)]
struct SearchQuery {
    q: Option<String>,
    limit: Option<String>,
}

async fn search_assets(State(state): State<AppState>, Query(q): Query<SearchQuery>) -> Response {
    let Some(query) = q.q else {
        return error(
            StatusCode::BAD_REQUEST,
            "bad_query",
            "q is required",
            Value::Null,
        );
    };
    let limit = match parse_positive(
        "limit",
        q.limit.as_deref(),
        DEFAULT_SEARCH_LIMIT,
        MAX_SEARCH_LIMIT,
    ) {
        Ok(l) => l,
        Err(r) => return r,
    };
    match state.store.catalog().search(&query, limit) {
        Ok(hits) => {
            let wire: Vec<AssetRecordWire> = hits.iter().map(AssetRecordWire::from).collect();
            json_response(StatusCode::OK, &wire)
        }
        Err(e) => catalog_error(e),
    }
}

/// Writes one canonical-JSON line per request to stdout.
async fn request_log(req: Request, next: Next) -> Response {
    let start = Instant::now();
    let method = req.method().to_string();
    let path = req.uri().path().to_owned();
    let resp = next.run(req).await;
    let line = json!({
        "duration_us": start.elapsed().as_micros() as u64,
        "method": method,
        "path": path,
        "status": resp.status().as_u16(),
    });
    println!(
        "{}",
        String::from_utf8(canonical::value_to_vec(&line)).expect("json is utf-8")
    );
    resp
}

pub fn router(state: AppState) -> Router {
    let log = state.request_log;
    let app = Router::new()
        .route("/stories", get(list).post(publish))
        .route("/stories/{id}", get(fetch))
        .route("/stories/{id}/meta", get(meta))
        .route("/stories/{id}/lineage", get(lineage))
        .route("/stats", get(stats))
        .route("/assets", get(search_assets).post(put_asset))
        .route("/assets/{key}", get(get_asset))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES));
    let app = if log {
        app.layer(middleware::from_fn(request_log))
    } else {
        app
    };
    app.with_state(state)
}
