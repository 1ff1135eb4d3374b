//! HTTP interface over a document store.
//!
//! | route | |
//! |---|---|
//! | `GET /api/documents` | manifest entries |
//! | `POST /api/search` | `{"query", "limit"?}` → ranked results |
//! | `POST /api/summarize` | [`SummarizeRequest`] → JSON or HTML comparison |
//! | `GET /ui/*` | static files from the configured UI directory |

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::render::Format;
use crate::search::{SearchIndex, SearchResult};
use crate::store::{DocumentEntry, Store, StoreError};
use crate::summarize::{Budget, FeatureQuery, SummarizeError, Summarizer, SynonymLexicon, WeightParams};
use crate::text::Analyzer;

pub const DEFAULT_SEARCH_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub query: String,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    DEFAULT_SEARCH_LIMIT
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SummarizeRequest {
    /// Column order of the result.
    pub doc_ids: Vec<String>,
    #[serde(default)]
    pub query: String,
    pub features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sentences: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tag: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_loc: Option<f64>,
    #[serde(default)]
    pub skip_headings: bool,
}

impl SummarizeRequest {
    pub fn params(&self) -> Result<WeightParams, ApiError> {
        let defaults = WeightParams::default();
        let budget = match (self.max_sentences, self.ratio) {
            (Some(_), Some(_)) => return Err(ApiError::bad_request("give max_sentences or ratio, not both")),
            (Some(n), None) => Budget::MaxSentences(n),
            (None, Some(r)) => Budget::Ratio(r),
            (None, None) => defaults.budget,
        };
        let params = WeightParams {
            gamma: self.gamma.unwrap_or(defaults.gamma),
            alpha_tag: self.alpha_tag.unwrap_or(defaults.alpha_tag),
            beta_loc: self.beta_loc.unwrap_or(defaults.beta_loc),
            budget,
            skip_headings: self.skip_headings,
        };
        params.validate().map_err(ApiError::from)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.into(),
                doc_id: None,
            },
        }
    }

    pub fn bad_request(error: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, error)
    }

    pub fn unknown_document(doc_id: &str) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody {
                error: format!("unknown document {doc_id:?}"),
                doc_id: Some(doc_id.to_string()),
            },
        }
    }

    fn internal(error: impl std::fmt::Display) -> Self {
        tracing::error!(%error, "request failed");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, error.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(id) => Self::unknown_document(&id),
            e => Self::internal(e),
        }
    }
}

impl From<SummarizeError> for ApiError {
    fn from(e: SummarizeError) -> Self {
        match e {
            SummarizeError::NoFeatures | SummarizeError::NoDocuments | SummarizeError::InvalidParams(_) => {
                Self::bad_request(e.to_string())
            }
            e => Self::internal(e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// Shared state behind every handler.
pub struct AppState {
    store: Arc<Store>,
    analyzer: Arc<Analyzer>,
    synonyms: Option<SynonymLexicon>,
    ui_dir: Option<PathBuf>,
    // Rebuilt when the manifest changes.
    search_cache: Mutex<Option<(Vec<DocumentEntry>, Arc<SearchIndex>)>>,
}

impl AppState {
    pub fn new(store: Arc<Store>, analyzer: Arc<Analyzer>) -> Self {
        Self {
            store,
            analyzer,
            synonyms: None,
            ui_dir: None,
            search_cache: Mutex::new(None),
        }
    }

    pub fn with_synonyms(mut self, synonyms: SynonymLexicon) -> Self {
        self.synonyms = Some(synonyms);
        self
    }

    pub fn with_ui_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.ui_dir = Some(dir.into());
        self
    }

    pub fn documents(&self) -> Result<Vec<DocumentEntry>, ApiError> {
        Ok(self.store.list_documents()?)
    }

    fn index(&self) -> Result<Arc<SearchIndex>, ApiError> {
        let entries = self.store.list_documents()?;
        let mut cache = self.search_cache.lock().unwrap_or_else(|p| p.into_inner());
        if let Some((seen, index)) = cache.as_ref() {
            if *seen == entries {
                return Ok(index.clone());
            }
        }
        let records = entries
            .iter()
            .map(|e| self.store.load_document(&e.doc_id))
            .collect::<Result<Vec<_>, _>>()?;
        let index = Arc::new(SearchIndex::from_records(self.analyzer.clone(), &records));
        *cache = Some((entries, index.clone()));
        Ok(index)
    }

    pub fn search(&self, req: &SearchRequest) -> Result<Vec<SearchResult>, ApiError> {
        self.index()?
            .search(&req.query, req.limit)
            .map_err(|e| ApiError::bad_request(e.to_string()))
    }

    pub fn summarize(&self, req: &SummarizeRequest, format: Format) -> Result<String, ApiError> {
        if req.doc_ids.is_empty() {
            return Err(ApiError::bad_request("at least one document is required"));
        }
        let fq = FeatureQuery::new(&self.analyzer, &req.query, &req.features, self.synonyms.as_ref())?;
        let summarizer = Summarizer::new(self.analyzer.clone(), fq, req.params()?)?;
        let records = req
            .doc_ids
            .iter()
            .map(|id| self.store.load_document(id))
            .collect::<Result<Vec<_>, _>>()?;
        let summary = summarizer.compare(&records)?;
        Ok(format.render(&summary))
    }
}

#[derive(Debug, Deserialize)]
struct FormatParam {
    format: Option<String>,
}

/// `?format=` wins; otherwise HTML only when the Accept header asks for it
/// and does not also list JSON first.
fn negotiate(param: Option<&str>, headers: &HeaderMap) -> Result<Format, ApiError> {
    if let Some(f) = param {
        return f.parse().map_err(ApiError::bad_request);
    }
    let accept = headers.get(header::ACCEPT).and_then(|v| v.to_str().ok()).unwrap_or("");
    let html = accept.find("text/html");
    let json = accept.find("application/json");
    Ok(match (html, json) {
        (Some(h), Some(j)) if h < j => Format::Html,
        (Some(_), None) => Format::Html,
        _ => Format::Json,
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)?
}

async fn list_documents(State(state): State<Arc<AppState>>) -> Result<Json<Vec<DocumentEntry>>, ApiError> {
    blocking(move || state.documents()).await.map(Json)
}

async fn search(
    State(state): State<Arc<AppState>>,
    Json(req): Json<SearchRequest>,
) -> Result<Json<Vec<SearchResult>>, ApiError> {
    blocking(move || state.search(&req)).await.map(Json)
}

async fn summarize(
    State(state): State<Arc<AppState>>,
    Query(param): Query<FormatParam>,
    headers: HeaderMap,
    Json(req): Json<SummarizeRequest>,
) -> Result<Response, ApiError> {
    let format = negotiate(param.format.as_deref(), &headers)?;
    let body = blocking(move || state.summarize(&req, format)).await?;
    Ok(([(header::CONTENT_TYPE, format.content_type())], body).into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    let mut app = Router::new()
        .route("/api/documents", get(list_documents))
        .route("/api/search", post(search))
        .route("/api/summarize", post(summarize));
    if let Some(dir) = &state.ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    app.with_state(state)
}

/// Serves until the future is dropped or ctrl-c arrives.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
