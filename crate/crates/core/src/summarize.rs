//! Query-time summarization.
//!
//! For each selected document the concept block most similar to the
//! feature keywords is chosen, its sentences are weighted against the
//! query and feature keywords, and the best ones are grouped under the
//! headings they were found beneath. Per-document summaries are then laid
//! side by side in a [`ComparativeSummary`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dom::{Emphasis, EmphasisSet};
use crate::segment::ConceptBlock;
use crate::store::DocumentRecord;
use crate::text::{Analyzer, Sentence};

/// Subtitle of the single empty section emitted when no block matches.
pub const NO_MATCH_SUBTITLE: &str = "no match";

#[derive(Debug, Error, PartialEq)]
pub enum SummarizeError {
    #[error("at least one feature keyword is required")]
    NoFeatures,
    #[error("concept block {0} has an empty concept list")]
    EmptyConcepts(u32),
    #[error("document {0} has no concept blocks")]
    NoBlocks(String),
    #[error("sentence {0} has no tokens")]
    EmptySentence(u32),
    #[error("at least one document is required")]
    NoDocuments,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Groups of interchangeable terms, one group per line:
///
/// ```text
/// placement: recruitment, hiring
/// fee = tuition, charges
/// ```
///
/// All members of a group, the head included, are synonyms of each other.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    groups: Vec<BTreeSet<String>>,
}

impl SynonymLexicon {
    pub fn parse(text: &str, analyzer: &Analyzer) -> Self {
        let groups = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|line| {
                let group: BTreeSet<String> = line
                    .split([',', ':', '='])
                    .map(|w| analyzer.terms(w).join(" "))
                    .filter(|w| !w.is_empty())
                    .collect();
                (group.len() > 1).then_some(group)
            })
            .collect();
        Self { groups }
    }

    pub fn from_file(path: &Path, analyzer: &Analyzer) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?, analyzer))
    }

    /// Every other member of any group containing `term`.
    pub fn synonyms_of(&self, term: &str) -> Vec<String> {
        let mut out: BTreeSet<&String> = BTreeSet::new();
        for g in self.groups.iter().filter(|g| g.contains(term)) {
            out.extend(g.iter().filter(|t| *t != term));
        }
        out.into_iter().cloned().collect()
    }
}

/// Normalized query and feature terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureQuery {
    /// The query as typed.
    pub query: String,
    /// The feature keywords as typed.
    pub features: Vec<String>,
    pub query_terms: Vec<String>,
    pub feature_terms: Vec<String>,
    /// Canonical term → equivalent terms.
    pub synonyms: BTreeMap<String, Vec<String>>,
}

impl FeatureQuery {
    pub fn new<S: AsRef<str>>(
        analyzer: &Analyzer,
        query: &str,
        features: &[S],
        synonyms: Option<&SynonymLexicon>,
    ) -> Result<Self, SummarizeError> {
        let dedup = |terms: Vec<String>| {
            let mut seen = BTreeSet::new();
            terms.into_iter().filter(|t| seen.insert(t.clone())).collect::<Vec<_>>()
        };
        let query_terms = dedup(analyzer.terms(query));
        let feature_terms = dedup(features.iter().flat_map(|f| analyzer.terms(f.as_ref())).collect());
        if feature_terms.is_empty() {
            return Err(SummarizeError::NoFeatures);
        }
        let synonyms = match synonyms {
            Some(lex) => query_terms
                .iter()
                .chain(&feature_terms)
                .map(|t| (t.clone(), lex.synonyms_of(t)))
                .filter(|(_, s)| !s.is_empty())
                .collect(),
            None => BTreeMap::new(),
        };
        Ok(Self {
            query: query.to_string(),
            features: features.iter().map(|f| f.as_ref().trim().to_string()).collect(),
            query_terms,
            feature_terms,
            synonyms,
        })
    }

    fn matches(&self, canonical: &str, term: &str) -> bool {
        canonical == term
            || self
                .synonyms
                .get(canonical)
                .is_some_and(|s| s.iter().any(|x| x == term))
    }

    /// The feature term `term` stands for, directly or as a synonym.
    pub fn feature_for(&self, term: &str) -> Option<&str> {
        self.feature_terms
            .iter()
            .find(|f| self.matches(f, term))
            .map(String::as_str)
    }

    /// The query or feature term `term` stands for.
    pub fn keyword_for(&self, term: &str) -> Option<&str> {
        self.query_terms
            .iter()
            .chain(&self.feature_terms)
            .find(|k| self.matches(k, term))
            .map(String::as_str)
    }
}

/// How many sentences to extract from the selected block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    MaxSentences(usize),
    /// Fraction of the block's sentences, rounded up.
    Ratio(f64),
}

impl Budget {
    pub fn sentences_for(&self, available: usize) -> usize {
        match *self {
            Budget::MaxSentences(n) => n,
            // The epsilon keeps 0.3 × 10 at 3 despite binary rounding.
            Budget::Ratio(r) => ((r * available as f64) - 1e-9).ceil().max(0.0) as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Decay of the keyword-distance bonus.
    pub gamma: f64,
    /// Multiplier of the tag weight.
    pub alpha_tag: f64,
    /// Multiplier of the location weight.
    pub beta_loc: f64,
    pub budget: Budget,
    /// Leave out sentences that are just their section's subtitle.
    #[serde(default)]
    pub skip_headings: bool,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            alpha_tag: 1.0,
            beta_loc: 1.0,
            budget: Budget::MaxSentences(5),
            skip_headings: false,
        }
    }
}

impl WeightParams {
    pub fn validate(&self) -> Result<(), SummarizeError> {
        let bad = |m: String| Err(SummarizeError::InvalidParams(m));
        for (name, v) in [
            ("gamma", self.gamma),
            ("alpha_tag", self.alpha_tag),
            ("beta_loc", self.beta_loc),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        match self.budget {
            Budget::MaxSentences(0) => bad("max_sentences must be positive".into()),
            Budget::Ratio(r) if !(r > 0.0 && r <= 1.0) => bad(format!("ratio must lie in (0, 1], got {r}")),
            _ => Ok(()),
        }
    }
}

/// Relevance of a concept block to the feature keywords: the ctf mass of
/// matching concepts over the length of the block's frequency vector,
/// capped at 1.
pub fn feature_block_similarity(fq: &FeatureQuery, cb: &ConceptBlock) -> Result<f64, SummarizeError> {
    let (matched, squares) = feature_block_terms(fq, cb)?;
    Ok((matched as f64 / (squares as f64).sqrt()).min(1.0))
}

/// (Σ matched ctf, Σ ctf²) for a block.
fn feature_block_terms(fq: &FeatureQuery, cb: &ConceptBlock) -> Result<(u64, u64), SummarizeError> {
    if cb.concepts.is_empty() {
        return Err(SummarizeError::EmptyConcepts(cb.id));
    }
    let matched = cb
        .concepts
        .iter()
        .filter(|(t, _)| fq.feature_for(t).is_some())
        .map(|(_, c)| u64::from(c))
        .sum();
    Ok((matched, cb.concepts.sum_of_squares()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockSelection<'a> {
    Best {
        block: &'a ConceptBlock,
        similarity: f64,
    },
    /// Every block scored zero.
    NoRelevantBlock,
}

/// Highest-similarity block, lowest id on ties.
///
/// Candidates are compared exactly as fractions (m²∧s)/s over integers, so
/// the choice does not depend on floating-point rounding. Blocks with an
/// empty concept list score zero.
pub fn select_best_block<'a>(
    fq: &FeatureQuery,
    blocks: &'a [ConceptBlock],
) -> Result<BlockSelection<'a>, SummarizeError> {
    if blocks.is_empty() {
        return Err(SummarizeError::NoBlocks(String::new()));
    }
    // Squared, capped similarity as numerator / denominator.
    let key = |cb: &ConceptBlock| -> (u128, u128) {
        match feature_block_terms(fq, cb) {
            Ok((m, s)) => {
                let m2 = u128::from(m) * u128::from(m);
                (m2.min(u128::from(s)), u128::from(s))
            }
            Err(_) => (0, 1),
        }
    };
    let cmp = |(an, ad): (u128, u128), (bn, bd): (u128, u128)| match (an.checked_mul(bd), bn.checked_mul(ad)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => (an as f64 / ad as f64).total_cmp(&(bn as f64 / bd as f64)),
    };
    let mut ordered: Vec<&ConceptBlock> = blocks.iter().collect();
    ordered.sort_by_key(|cb| cb.id);
    let mut best: Option<(&ConceptBlock, (u128, u128))> = None;
    for cb in ordered {
        let k = key(cb);
        if k.0 == 0 {
            continue;
        }
        if best.is_none_or(|(_, bk)| cmp(k, bk) == Ordering::Greater) {
            best = Some((cb, k));
        }
    }
    Ok(match best {
        Some((block, _)) => BlockSelection::Best {
            block,
            similarity: feature_block_similarity(fq, block)?,
        },
        None => BlockSelection::NoRelevantBlock,
    })
}

/// Mean number of tokens between consecutive matched positions, at least
/// 1. Fewer than two matches give infinity.
pub fn average_gap(positions: &[usize]) -> f64 {
    if positions.len() < 2 {
        return f64::INFINITY;
    }
    let gaps: usize = positions.windows(2).map(|w| w[1] - w[0] - 1).sum();
    (gaps as f64 / (positions.len() - 1) as f64).max(1.0)
}

/// Token positions of `s` whose stem is one of `terms`.
pub fn keyword_positions(analyzer: &Analyzer, s: &Sentence, terms: &[String]) -> Vec<usize> {
    s.tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !analyzer.is_stopword(t))
        .filter(|(_, t)| {
            let stem = analyzer.stem(t);
            terms.contains(&stem)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Average distance between the occurrences of `terms` in `s`.
pub fn avg_feature_distance(analyzer: &Analyzer, s: &Sentence, terms: &[String]) -> f64 {
    average_gap(&keyword_positions(analyzer, s, terms))
}

/// 3 for bold, underline, italics, caption or paragraph title; 2 for a
/// colour change; 0 otherwise.
pub fn tag_weight(emphasis: &EmphasisSet) -> f64 {
    use Emphasis::*;
    if emphasis
        .iter()
        .any(|e| matches!(e, Bold | Underline | Italics | Caption | ParagraphTitle))
    {
        3.0
    } else if emphasis.contains(&ColorChange) {
        2.0
    } else {
        0.0
    }
}

/// 1 for the leftmost child, 0.5 for the rightmost, linear in between.
pub fn location_weight(sibling_index: u32, sibling_count: u32) -> f64 {
    if sibling_count <= 1 {
        return 1.0;
    }
    1.0 - 0.5 * f64::from(sibling_index) / f64::from(sibling_count - 1)
}

/// The inputs of a sentence weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightComponents {
    /// Σ occurrences of query and feature terms.
    pub keyword_weight: f64,
    /// Average keyword distance; infinite when fewer than two matches.
    pub distance: f64,
    pub tag_weight: f64,
    pub location_weight: f64,
    /// Token count.
    pub length: usize,
}

impl WeightComponents {
    pub fn of(analyzer: &Analyzer, s: &Sentence, fq: &FeatureQuery) -> Self {
        let positions: Vec<usize> = s
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !analyzer.is_stopword(t) && fq.keyword_for(&analyzer.stem(t)).is_some())
            .map(|(i, _)| i)
            .collect();
        Self {
            keyword_weight: positions.len() as f64,
            distance: average_gap(&positions),
            tag_weight: tag_weight(&s.emphasis),
            location_weight: location_weight(s.sibling_index, s.sibling_count),
            length: s.tokens.len(),
        }
    }

    /// `[Σ W(k) + e^(−γ(D−1)) + α·W_tag + β·W_l] / Len`.
    pub fn weight(&self, p: &WeightParams) -> Result<f64, SummarizeError> {
        if self.length == 0 {
            return Err(SummarizeError::EmptySentence(0));
        }
        let proximity = if self.distance.is_finite() {
            (-p.gamma * (self.distance - 1.0)).exp()
        } else {
            0.0
        };
        let total = self.keyword_weight + proximity + p.alpha_tag * self.tag_weight + p.beta_loc * self.location_weight;
        Ok(total / self.length as f64)
    }
}

pub fn sentence_weight(
    analyzer: &Analyzer,
    s: &Sentence,
    fq: &FeatureQuery,
    p: &WeightParams,
) -> Result<f64, SummarizeError> {
    WeightComponents::of(analyzer, s, fq)
        .weight(p)
        .map_err(|_| SummarizeError::EmptySentence(s.seq_no))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedSentence {
    pub seq_no: u32,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub subtitle: String,
    /// Document order.
    pub sentences: Vec<ExtractedSentence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub doc_id: String,
    pub title: String,
    pub source: String,
    /// False when no concept block matched the features.
    pub matched: bool,
    /// Id of the concept block the sentences came from.
    pub concept_block: Option<u32>,
    pub sections: Vec<Section>,
}

impl DocumentSummary {
    pub fn sentences(&self) -> impl Iterator<Item = &ExtractedSentence> {
        self.sections.iter().flat_map(|s| &s.sentences)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparativeSummary {
    pub query: String,
    pub features: Vec<String>,
    /// In selection order.
    pub columns: Vec<DocumentSummary>,
}

/// Rebuilds the scoring view of a stored sentence.
pub fn stored_sentence(analyzer: &Analyzer, rec: &DocumentRecord, seq_no: u32) -> Option<Sentence> {
    let s = rec.sentences.get(&seq_no)?;
    Some(Sentence {
        doc_id: rec.doc_id.clone(),
        seq_no,
        text: s.text.clone(),
        tokens: analyzer.tokenize(&s.text),
        emphasis: s.emphasis.clone(),
        sibling_index: s.sibling_index,
        sibling_count: s.sibling_count,
    })
}

pub fn extract_summary(
    analyzer: &Analyzer,
    rec: &DocumentRecord,
    fq: &FeatureQuery,
    p: &WeightParams,
) -> Result<DocumentSummary, SummarizeError> {
    p.validate()?;
    let selection = select_best_block(fq, &rec.concept_blocks).map_err(|e| match e {
        SummarizeError::NoBlocks(_) => SummarizeError::NoBlocks(rec.doc_id.clone()),
        e => e,
    })?;
    let block = match selection {
        BlockSelection::Best { block, .. } => block,
        BlockSelection::NoRelevantBlock => {
            return Ok(DocumentSummary {
                doc_id: rec.doc_id.clone(),
                title: rec.title.clone(),
                source: rec.source.clone(),
                matched: false,
                concept_block: None,
                sections: vec![Section {
                    subtitle: NO_MATCH_SUBTITLE.into(),
                    sentences: Vec::new(),
                }],
            })
        }
    };

    let candidates: Vec<u32> = block
        .sentence_refs
        .iter()
        .copied()
        .filter(|seq| {
            let stored = &rec.sentences[seq];
            !(p.skip_headings && stored.heading.as_deref() == Some(stored.text.as_str()))
        })
        .collect();
    let mut scored = Vec::with_capacity(candidates.len());
    for &seq in &candidates {
        let s = stored_sentence(analyzer, rec, seq).ok_or(SummarizeError::NoBlocks(rec.doc_id.clone()))?;
        let score = sentence_weight(analyzer, &s, fq, p)?;
        scored.push((seq, score));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(p.budget.sentences_for(candidates.len()));
    scored.sort_by_key(|&(seq, _)| seq);

    let mut sections: Vec<Section> = Vec::new();
    for (seq, score) in scored {
        let stored = &rec.sentences[&seq];
        let subtitle = stored.heading.clone().unwrap_or_else(|| rec.title.clone());
        let sentence = ExtractedSentence {
            seq_no: seq,
            text: stored.text.clone(),
            score,
        };
        match sections.iter_mut().find(|s| s.subtitle == subtitle) {
            Some(section) => section.sentences.push(sentence),
            None => sections.push(Section {
                subtitle,
                sentences: vec![sentence],
            }),
        }
    }

    Ok(DocumentSummary {
        doc_id: rec.doc_id.clone(),
        title: rec.title.clone(),
        source: rec.source.clone(),
        matched: true,
        concept_block: Some(block.id),
        sections,
    })
}

/// Lays the summaries out as columns in the given order.
pub fn compose_comparative(
    summaries: Vec<DocumentSummary>,
    fq: &FeatureQuery,
) -> Result<ComparativeSummary, SummarizeError> {
    if summaries.is_empty() {
        return Err(SummarizeError::NoDocuments);
    }
    Ok(ComparativeSummary {
        query: fq.query.clone(),
        features: fq.features.clone(),
        columns: summaries,
    })
}

/// One feature query and parameter set applied to every document, so
/// all columns of a comparison are built alike.
#[derive(Debug, Clone)]
pub struct Summarizer {
    analyzer: Arc<Analyzer>,
    query: FeatureQuery,
    params: WeightParams,
}

impl Summarizer {
    pub fn new(analyzer: Arc<Analyzer>, query: FeatureQuery, params: WeightParams) -> Result<Self, SummarizeError> {
        params.validate()?;
        Ok(Self {
            analyzer,
            query,
            params,
        })
    }

    pub fn query(&self) -> &FeatureQuery {
        &self.query
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn summarize(&self, rec: &DocumentRecord) -> Result<DocumentSummary, SummarizeError> {
        extract_summary(&self.analyzer, rec, &self.query, &self.params)
    }

    pub fn compare<'a>(
        &self,
        records: impl IntoIterator<Item = &'a DocumentRecord>,
    ) -> Result<ComparativeSummary, SummarizeError> {
        let summaries = records
            .into_iter()
            .map(|r| self.summarize(r))
            .collect::<Result<Vec<_>, _>>()?;
        compose_comparative(summaries, &self.query)
    }
}
