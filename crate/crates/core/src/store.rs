//! Offline persistence of segmented documents.
//!
//! Layout under the store directory:
//!
//! ```text
//! manifest.json        listing of every stored document
//! docs/<doc_id>.json   one DocumentRecord per file
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place, so
//! readers see either the previous or the new version of a record.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dom::EmphasisSet;
use crate::segment::ConceptBlock;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O error at {path}: {error}")]
    Io { path: PathBuf, error: io::Error },
    #[error("malformed JSON in {path}: {error}")]
    Json { path: PathBuf, error: serde_json::Error },
    #[error("unknown document {0:?}")]
    NotFound(String),
    #[error("invalid record: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredSentence {
    pub text: String,
    pub emphasis: EmphasisSet,
    pub sibling_index: u32,
    pub sibling_count: u32,
    pub heading: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub source: String,
    pub title: String,
    /// Keyed by document-wide sequence number; keys are dense from 0.
    pub sentences: BTreeMap<u32, StoredSentence>,
    pub concept_blocks: Vec<ConceptBlock>,
    pub indexed_at: DateTime<Utc>,
    pub pipeline_version: String,
}

impl DocumentRecord {
    pub fn validate(&self) -> Result<(), StoreError> {
        let invalid = |msg: String| Err(StoreError::Validation(msg));
        validate_doc_id(&self.doc_id)?;
        if let Some((i, seq)) = self.sentences.keys().enumerate().find(|(i, seq)| **seq as usize != *i) {
            return invalid(format!("sentence keys are not dense: position {i} holds {seq}"));
        }
        for cb in &self.concept_blocks {
            if cb.doc_id != self.doc_id {
                return invalid(format!("concept block {} belongs to {:?}", cb.id, cb.doc_id));
            }
            if cb.sentence_refs.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!(
                    "concept block {} has unsorted or repeated sentence refs",
                    cb.id
                ));
            }
            if let Some(r) = cb.sentence_refs.iter().find(|r| !self.sentences.contains_key(r)) {
                return invalid(format!("concept block {} references missing sentence {r}", cb.id));
            }
            if cb.concepts.iter().any(|(_, ctf)| ctf == 0) {
                return invalid(format!("concept block {} has a zero ctf", cb.id));
            }
        }
        Ok(())
    }

    pub fn entry(&self) -> DocumentEntry {
        DocumentEntry {
            doc_id: self.doc_id.clone(),
            source: self.source.clone(),
            title: self.title.clone(),
            indexed_at: self.indexed_at,
        }
    }
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentEntry {
    pub doc_id: String,
    pub source: String,
    pub title: String,
    pub indexed_at: DateTime<Utc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    documents: Vec<DocumentEntry>,
}

/// Ids become file names, so they are limited to `[A-Za-z0-9._-]` and may
/// not start with a dot.
pub fn validate_doc_id(doc_id: &str) -> Result<(), StoreError> {
    let ok = !doc_id.is_empty()
        && !doc_id.starts_with('.')
        && doc_id.len() <= 200
        && doc_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::Validation(format!("invalid document id {doc_id:?}")))
    }
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    writer: Mutex<()>,
    expected_version: Option<String>,
}

impl Store {
    /// Opens (creating if needed) a store rooted at `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = dir.as_ref().to_path_buf();
        let docs = root.join("docs");
        fs::create_dir_all(&docs).map_err(|error| StoreError::Io { path: docs, error })?;
        Ok(Self {
            root,
            writer: Mutex::new(()),
            expected_version: None,
        })
    }

    /// Loads of records stamped with another pipeline version log a warning.
    pub fn with_expected_version(mut self, version: impl Into<String>) -> Self {
        self.expected_version = Some(version.into());
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn doc_path(&self, doc_id: &str) -> PathBuf {
        self.root.join("docs").join(format!("{doc_id}.json"))
    }

    fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    /// Validates and writes `rec`, replacing any record with the same id.
    pub fn store_document(&self, rec: &DocumentRecord) -> Result<(), StoreError> {
        rec.validate()?;
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        write_json_atomic(&self.doc_path(&rec.doc_id), rec)?;
        let mut manifest = self.read_manifest()?;
        manifest.documents.retain(|e| e.doc_id != rec.doc_id);
        manifest.documents.push(rec.entry());
        manifest.documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        write_json_atomic(&self.manifest_path(), &manifest)
    }

    pub fn load_document(&self, doc_id: &str) -> Result<DocumentRecord, StoreError> {
        if validate_doc_id(doc_id).is_err() {
            return Err(StoreError::NotFound(doc_id.to_string()));
        }
        let path = self.doc_path(doc_id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(doc_id.to_string())),
            Err(error) => return Err(StoreError::Io { path, error }),
        };
        let rec: DocumentRecord = serde_json::from_slice(&bytes).map_err(|error| StoreError::Json { path, error })?;
        if let Some(expected) = &self.expected_version {
            if &rec.pipeline_version != expected {
                tracing::warn!(
                    doc_id,
                    stored = %rec.pipeline_version,
                    current = %expected,
                    "record was indexed by a different pipeline; re-index to refresh it"
                );
            }
        }
        Ok(rec)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        validate_doc_id(doc_id).is_ok() && self.doc_path(doc_id).is_file()
    }

    /// Stored documents sorted by id.
    pub fn list_documents(&self) -> Result<Vec<DocumentEntry>, StoreError> {
        Ok(self.read_manifest()?.documents)
    }

    /// Every stored record, in id order.
    pub fn load_all(&self) -> Result<Vec<DocumentRecord>, StoreError> {
        self.list_documents()?
            .iter()
            .map(|e| self.load_document(&e.doc_id))
            .collect()
    }

    fn read_manifest(&self) -> Result<Manifest, StoreError> {
        let path = self.manifest_path();
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|error| StoreError::Json { path, error }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Manifest::default()),
            Err(error) => Err(StoreError::Io { path, error }),
        }
    }
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), StoreError> {
    let io_err = |error: io::Error| StoreError::Io {
        path: path.to_path_buf(),
        error,
    };
    let dir = path.parent().expect("store paths have a parent");
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    serde_json::to_writer_pretty(&mut tmp, value).map_err(|error| StoreError::Json {
        path: path.to_path_buf(),
        error,
    })?;
    tmp.write_all(b"\n").map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
