//! TF-IDF keyword search over indexed documents.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::{DocumentEntry, DocumentRecord};
use crate::text::Analyzer;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("query has no searchable terms")]
    EmptyQuery,
    #[error("limit must be positive")]
    ZeroLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub doc_id: String,
    pub source: String,
    pub title: String,
    pub score: f64,
    pub snippet: String,
}

#[derive(Debug, Clone)]
struct IndexedDoc {
    entry: DocumentEntry,
    tf: HashMap<String, u32>,
    /// Sentences in document order with their term sets, for snippets.
    sentences: Vec<(String, BTreeSet<String>)>,
}

/// In-memory inverted statistics over a set of documents.
#[derive(Debug, Clone)]
pub struct SearchIndex {
    analyzer: Arc<Analyzer>,
    docs: Vec<IndexedDoc>,
    df: HashMap<String, u32>,
}

impl SearchIndex {
    pub fn new(analyzer: Arc<Analyzer>) -> Self {
        Self {
            analyzer,
            docs: Vec::new(),
            df: HashMap::new(),
        }
    }

    pub fn from_records<'a>(analyzer: Arc<Analyzer>, records: impl IntoIterator<Item = &'a DocumentRecord>) -> Self {
        let mut index = Self::new(analyzer);
        for rec in records {
            index.add(rec);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Adds or replaces a document. The title counts as document text.
    pub fn add(&mut self, rec: &DocumentRecord) {
        self.remove(&rec.doc_id);
        let mut tf: HashMap<String, u32> = HashMap::new();
        for term in self.analyzer.terms(&rec.title) {
            *tf.entry(term).or_default() += 1;
        }
        let mut sentences = Vec::with_capacity(rec.sentences.len());
        for s in rec.sentences.values() {
            let terms = self.analyzer.terms(&s.text);
            for t in &terms {
                *tf.entry(t.clone()).or_default() += 1;
            }
            sentences.push((s.text.clone(), terms.into_iter().collect()));
        }
        for term in tf.keys() {
            *self.df.entry(term.clone()).or_default() += 1;
        }
        self.docs.push(IndexedDoc {
            entry: rec.entry(),
            tf,
            sentences,
        });
    }

    fn remove(&mut self, doc_id: &str) {
        let Some(pos) = self.docs.iter().position(|d| d.entry.doc_id == doc_id) else {
            return;
        };
        let old = self.docs.remove(pos);
        for term in old.tf.keys() {
            if let Some(n) = self.df.get_mut(term) {
                *n -= 1;
                if *n == 0 {
                    self.df.remove(term);
                }
            }
        }
    }

    /// Raw count of a stemmed term in a document.
    pub fn term_frequency(&self, doc_id: &str, term: &str) -> Option<u32> {
        let doc = self.docs.iter().find(|d| d.entry.doc_id == doc_id)?;
        Some(doc.tf.get(term).copied().unwrap_or(0))
    }

    /// `ln(1 + N / df)`, or `None` for a term no document contains.
    pub fn idf(&self, term: &str) -> Option<f64> {
        let df = *self.df.get(term)?;
        Some((1.0 + self.docs.len() as f64 / f64::from(df)).ln())
    }

    /// Documents with a positive Σ tf·idf over the distinct query terms,
    /// best first, ties by doc id.
    pub fn search(&self, query: &str, limit: usize) -> Result<Vec<SearchResult>, SearchError> {
        if limit == 0 {
            return Err(SearchError::ZeroLimit);
        }
        let terms: BTreeSet<String> = self.analyzer.terms(query).into_iter().collect();
        if terms.is_empty() {
            return Err(SearchError::EmptyQuery);
        }
        let weighted: Vec<(&String, f64)> = terms.iter().filter_map(|t| Some((t, self.idf(t)?))).collect();

        let mut results: Vec<SearchResult> = self
            .docs
            .iter()
            .filter_map(|doc| {
                let score: f64 = weighted
                    .iter()
                    .map(|(t, idf)| f64::from(doc.tf.get(*t).copied().unwrap_or(0)) * idf)
                    .sum();
                (score > 0.0).then(|| SearchResult {
                    doc_id: doc.entry.doc_id.clone(),
                    source: doc.entry.source.clone(),
                    title: doc.entry.title.clone(),
                    score,
                    snippet: snippet(doc, &terms),
                })
            })
            .collect();
        results.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id)));
        results.truncate(limit);
        Ok(results)
    }
}

fn snippet(doc: &IndexedDoc, terms: &BTreeSet<String>) -> String {
    doc.sentences
        .iter()
        .find(|(_, ts)| !ts.is_disjoint(terms))
        .or_else(|| doc.sentences.first())
        .map(|(text, _)| text.clone())
        .unwrap_or_else(|| doc.entry.title.clone())
}
