//! HTML ingest: loading, cleaning, DOM construction and micro blocks.

mod clean;
mod load;
mod tree;

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clean::{clean_html, retained_text, REMOVED_ELEMENTS};
pub use load::{load_document, FetchConfig, Loader};
pub use tree::{build_dom, extract_micro_blocks, DomNode, DomTree, MicroBlock, PathStep};

/// Markup emphasis categories that feed the tag weight of a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emphasis {
    Bold,
    Underline,
    Italics,
    Caption,
    ParagraphTitle,
    ColorChange,
}

/// An empty set means no emphasis.
pub type EmphasisSet = BTreeSet<Emphasis>;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to fetch {source_ref}: {message}")]
    Fetch { source_ref: String, message: String },
    #[error("failed to read {path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("document {0} is empty")]
    EmptyDocument(String),
    #[error("document {source_ref}: {message}")]
    Encoding { source_ref: String, message: String },
    #[error("document {0} has no text after cleaning")]
    EmptyAfterClean(String),
    #[error("document {doc_id} could not be parsed: {message}")]
    Parse { doc_id: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub source: String,
    /// UTF-8 HTML. Other encodings are transcoded on load.
    pub bytes: Vec<u8>,
    pub fetched_at: DateTime<Utc>,
}

impl RawDocument {
    pub fn from_html(doc_id: impl Into<String>, source: impl Into<String>, html: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            source: source.into(),
            bytes: html.into().into_bytes(),
            fetched_at: Utc::now(),
        }
    }

    pub fn html(&self) -> Result<&str, IngestError> {
        std::str::from_utf8(&self.bytes).map_err(|e| IngestError::Parse {
            doc_id: self.doc_id.clone(),
            message: format!("not valid UTF-8: {e}"),
        })
    }
}
