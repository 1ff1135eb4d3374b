//! Tokenization, stemming, stopwords and sentence splitting.
//!
//! Every module that matches words against each other (concept extraction,
//! search, sentence weighting) goes through the same [`Analyzer`], so a
//! query term and a concept term compare equal exactly when their stems do.

mod lexicon;
mod sentence;

use std::fmt;

use rust_stemmers::{Algorithm, Stemmer};

pub use lexicon::{parse_word_list, Lexicon};
pub use sentence::{sentence_spans, Sentence};

pub struct Analyzer {
    lexicon: Lexicon,
    stemmer: Stemmer,
}

impl fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analyzer")
            .field("lexicon", &self.lexicon)
            .finish_non_exhaustive()
    }
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::new(Lexicon::bundled())
    }
}

impl Analyzer {
    pub fn new(lexicon: Lexicon) -> Self {
        Self {
            lexicon,
            stemmer: Stemmer::create(Algorithm::English),
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Lowercased runs of alphanumeric characters.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        token_spans(text).map(|(s, e)| text[s..e].to_lowercase()).collect()
    }

    pub fn stem(&self, token: &str) -> String {
        self.stemmer.stem(token).into_owned()
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.lexicon.is_stopword(token)
    }

    /// Stemmed, stopword-free terms of `text` in order. Used for queries,
    /// feature keywords and the search index.
    pub fn terms(&self, text: &str) -> Vec<String> {
        self.tokenize(text)
            .into_iter()
            .filter(|t| !self.is_stopword(t))
            .map(|t| self.stem(&t))
            .collect()
    }

    /// Splits normalized block text into sentences numbered consecutively
    /// from `starting_seq`. Emphasis and sibling fields are left at their
    /// defaults for the caller to fill in.
    pub fn split_sentences(&self, text: &str, doc_id: &str, starting_seq: u32) -> Vec<Sentence> {
        sentence_spans(text)
            .into_iter()
            .enumerate()
            .map(|(i, span)| {
                let text = text[span].to_string();
                Sentence {
                    doc_id: doc_id.to_string(),
                    seq_no: starting_seq + i as u32,
                    tokens: self.tokenize(&text),
                    text,
                    emphasis: Default::default(),
                    sibling_index: 0,
                    sibling_count: 1,
                }
            })
            .collect()
    }
}

/// Byte ranges of alphanumeric runs.
pub(crate) fn token_spans(text: &str) -> impl Iterator<Item = (usize, usize)> + '_ {
    let mut chars = text.char_indices().peekable();
    std::iter::from_fn(move || {
        let start = loop {
            let (i, c) = chars.next()?;
            if c.is_alphanumeric() {
                break i;
            }
        };
        let mut end = text.len();
        while let Some(&(i, c)) = chars.peek() {
            if !c.is_alphanumeric() {
                end = i;
                break;
            }
            chars.next();
        }
        Some((start, end))
    })
}

/// Collapses whitespace runs to a single space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
