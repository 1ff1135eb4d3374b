//! Offline indexing: raw HTML to a storable [`DocumentRecord`].

use std::sync::Arc;

use chrono::Utc;

use crate::concepts::{ConceptExtractor, HeuristicExtractor};
use crate::dom::{self, Emphasis, IngestError, RawDocument};
use crate::segment::Segmenter;
use crate::store::{DocumentRecord, StoredSentence};
use crate::text::Analyzer;

#[derive(Debug, Clone)]
pub struct Indexer {
    segmenter: Segmenter,
}

impl Indexer {
    pub fn new(segmenter: Segmenter) -> Self {
        Self { segmenter }
    }

    /// Heuristic extractor over `analyzer`, default merge threshold.
    pub fn with_analyzer(analyzer: Arc<Analyzer>) -> Self {
        let extractor: Arc<dyn ConceptExtractor> = Arc::new(HeuristicExtractor::new(analyzer.clone()));
        Self::new(Segmenter::new(analyzer, extractor))
    }

    pub fn segmenter(&self) -> &Segmenter {
        &self.segmenter
    }

    /// Identifies the extractor and threshold a record was built with.
    pub fn pipeline_version(&self) -> String {
        pipeline_version(self.segmenter.extractor().name(), self.segmenter.alpha())
    }

    /// Clean, parse, segment and assemble one document.
    pub fn index(&self, raw: &RawDocument) -> Result<DocumentRecord, IngestError> {
        let cleaned = dom::clean_html(raw)?;
        let tree = dom::build_dom(&cleaned)?;
        let micro = dom::extract_micro_blocks(&tree);
        let (topics, concept_blocks) = self.segmenter.segment(&micro);

        let mut sentences = std::collections::BTreeMap::new();
        for tb in &topics {
            for s in &tb.sentences {
                sentences.insert(
                    s.seq_no,
                    StoredSentence {
                        text: s.text.clone(),
                        emphasis: s.emphasis.clone(),
                        sibling_index: s.sibling_index,
                        sibling_count: s.sibling_count,
                        heading: tb.heading.clone(),
                    },
                );
            }
        }

        let title = tree
            .title
            .clone()
            .or_else(|| {
                micro
                    .iter()
                    .find(|m| m.emphasis.contains(&Emphasis::ParagraphTitle))
                    .map(|m| m.text.clone())
            })
            .unwrap_or_else(|| raw.doc_id.clone());

        Ok(DocumentRecord {
            doc_id: raw.doc_id.clone(),
            source: raw.source.clone(),
            title,
            sentences,
            concept_blocks,
            indexed_at: Utc::now(),
            pipeline_version: self.pipeline_version(),
        })
    }
}

impl Default for Indexer {
    fn default() -> Self {
        Self::with_analyzer(Arc::new(Analyzer::default()))
    }
}

pub fn pipeline_version(extractor: &str, alpha: f64) -> String {
    format!("compsum-{}/{extractor}/alpha={alpha}", crate::PIPELINE_REVISION)
}

/// Derives a store-safe document id from a path or URL: the last path
/// segment without its extension, with other characters mapped to `-`.
pub fn doc_id_for_source(source: &str) -> String {
    let trimmed = source.trim_end_matches('/');
    let last = trimmed.rsplit(['/', '\\']).next().unwrap_or(trimmed);
    let last = last.split(['?', '#']).next().unwrap_or(last);
    let stem = match last.rsplit_once('.') {
        Some((stem, ext)) if !stem.is_empty() && ext.chars().all(|c| c.is_ascii_alphanumeric()) => stem,
        _ => last,
    };
    let id: String = stem
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect();
    let id = id.trim_matches('-').to_string();
    if id.is_empty() {
        "doc".into()
    } else {
        id
    }
}
