//! Concept lists and the pluggable concept extractor.
//!
//! A concept is a normalized term that takes part in a verb-argument
//! structure of a sentence; its conceptual term frequency (ctf) counts how
//! often it appears across those structures. Block-level lists are the
//! additive merge of sentence-level lists.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::text::{Analyzer, Sentence};

/// Term → conceptual term frequency. Terms are kept sorted so every sum
/// over a list is evaluated in the same order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptList {
    pub entries: BTreeMap<String, u32>,
}

impl ConceptList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Zero counts are dropped.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut list = Self::new();
        for (term, ctf) in pairs {
            list.add(term, ctf);
        }
        list
    }

    pub fn add(&mut self, term: impl Into<String>, ctf: u32) {
        if ctf > 0 {
            *self.entries.entry(term.into()).or_insert(0) += ctf;
        }
    }

    pub fn get(&self, term: &str) -> Option<u32> {
        self.entries.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Σ ctf.
    pub fn mass(&self) -> u64 {
        self.entries.values().map(|&v| u64::from(v)).sum()
    }

    /// Σ ctf².
    pub fn sum_of_squares(&self) -> u64 {
        self.entries.values().map(|&v| u64::from(v) * u64::from(v)).sum()
    }

    /// Euclidean length of the frequency vector.
    pub fn norm(&self) -> f64 {
        (self.sum_of_squares() as f64).sqrt()
    }

    pub fn merge_from(&mut self, other: &ConceptList) {
        for (term, ctf) in other.iter() {
            self.add(term, ctf);
        }
    }
}

/// Additive union: shared terms have their ctf summed.
pub fn merge_concept_lists(a: &ConceptList, b: &ConceptList) -> ConceptList {
    let mut out = a.clone();
    out.merge_from(b);
    out
}

/// Produces the concept list of a sentence. Implementations must be
/// deterministic in the sentence text.
pub trait ConceptExtractor: Send + Sync {
    fn name(&self) -> &str;
    fn extract(&self, sentence: &Sentence) -> ConceptList;
}

/// Approximates verb-argument structures with a token window around each
/// detected verb.
///
/// Every non-stopword token within `window` positions of a verb (the verb
/// included) counts once per window it falls in. Sentences without a
/// detected verb fall back to plain non-stopword term counts.
#[derive(Debug, Clone)]
pub struct HeuristicExtractor {
    analyzer: Arc<Analyzer>,
    window: usize,
}

impl HeuristicExtractor {
    pub const NAME: &'static str = "heuristic-verb-window";
    pub const DEFAULT_WINDOW: usize = 4;

    pub fn new(analyzer: Arc<Analyzer>) -> Self {
        Self {
            analyzer,
            window: Self::DEFAULT_WINDOW,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }
}

impl ConceptExtractor for HeuristicExtractor {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn extract(&self, sentence: &Sentence) -> ConceptList {
        let tokens = &sentence.tokens;
        let lexicon = self.analyzer.lexicon();
        let stems: Vec<Option<String>> = tokens
            .iter()
            .map(|t| (!lexicon.is_stopword(t)).then(|| self.analyzer.stem(t)))
            .collect();
        let verbs: Vec<usize> = (0..tokens.len()).filter(|&i| lexicon.is_verb(&tokens[i])).collect();

        let mut list = ConceptList::new();
        if verbs.is_empty() {
            for stem in stems.iter().flatten() {
                list.add(stem.as_str(), 1);
            }
            return list;
        }
        for v in verbs {
            let lo = v.saturating_sub(self.window);
            let hi = (v + self.window).min(tokens.len() - 1);
            for stem in stems[lo..=hi].iter().flatten() {
                list.add(stem.as_str(), 1);
            }
        }
        list
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(analyzer: &Analyzer, text: &str) -> Sentence {
        analyzer.split_sentences(text, "d", 0).into_iter().next().unwrap()
    }

    /// Independent restatement of the window rule over raw tokens.
    fn window_oracle(analyzer: &Analyzer, text: &str) -> BTreeMap<String, u32> {
        let tokens = analyzer.tokenize(text);
        let lex = analyzer.lexicon();
        let mut out = BTreeMap::new();
        let verb_positions: Vec<usize> = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| lex.is_verb(t))
            .map(|(i, _)| i)
            .collect();
        for (i, tok) in tokens.iter().enumerate() {
            if lex.is_stopword(tok) {
                continue;
            }
            let hits = if verb_positions.is_empty() {
                1
            } else {
                verb_positions.iter().filter(|&&v| i.abs_diff(v) <= 4).count() as u32
            };
            if hits > 0 {
                *out.entry(analyzer.stem(tok)).or_insert(0) += hits;
            }
        }
        out
    }

    #[test]
    fn cell_trains_students() {
        let a = Arc::new(Analyzer::default());
        let ex = HeuristicExtractor::new(a.clone());
        let text = "The cell trains students.";
        let got = ex.extract(&sentence(&a, text));
        let want = ConceptList::from_pairs([("cell", 1), ("train", 1), ("student", 1)]);
        assert_eq!(got, want);
        assert_eq!(got.entries, window_oracle(&a, text));
    }

    #[test]
    fn matches_window_oracle_on_longer_sentences() {
        let a = Arc::new(Analyzer::default());
        let ex = HeuristicExtractor::new(a.clone());
        for text in [
            "The placement cell of the college trains final year students and invites leading recruiters every year to the campus.",
            "Students from IT and CSE departments were placed in top companies such as Infosys, Wipro and TCS.",
            "Hostel rooms library sports grounds auditorium.",
        ] {
            assert_eq!(ex.extract(&sentence(&a, text)).entries, window_oracle(&a, text), "{text}");
        }
    }

    #[test]
    fn stopword_only_sentence_is_empty() {
        let a = Arc::new(Analyzer::default());
        let ex = HeuristicExtractor::new(a.clone());
        assert!(ex.extract(&sentence(&a, "It is of the")).is_empty());
    }

    #[test]
    fn fallback_counts_occurrences() {
        let a = Arc::new(Analyzer::default());
        let ex = HeuristicExtractor::new(a.clone());
        let got = ex.extract(&sentence(&a, "Placement placement placement."));
        assert_eq!(got, ConceptList::from_pairs([("placement", 3)]));
    }

    #[test]
    fn overlapping_windows_count_twice() {
        let a = Arc::new(Analyzer::default());
        let ex = HeuristicExtractor::new(a.clone());
        let got = ex.extract(&sentence(&a, "Faculty train and guide students."));
        assert_eq!(got.get("student"), Some(2));
        assert_eq!(got.get("train"), Some(2));
    }

    #[test]
    fn merge_examples() {
        let a = ConceptList::from_pairs([("a", 1)]);
        let b = ConceptList::from_pairs([("a", 2), ("b", 1)]);
        assert_eq!(
            merge_concept_lists(&a, &b),
            ConceptList::from_pairs([("a", 3), ("b", 1)])
        );
        assert_eq!(merge_concept_lists(&ConceptList::new(), &b), b);
        assert_eq!(merge_concept_lists(&a, &b), merge_concept_lists(&b, &a));
    }

    #[test]
    fn norm_and_mass() {
        let l = ConceptList::from_pairs([("a", 3), ("b", 4), ("z", 0)]);
        assert_eq!(l.len(), 2);
        assert_eq!(l.mass(), 7);
        assert_eq!(l.norm(), 5.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn list() -> impl Strategy<Value = ConceptList> {
            proptest::collection::btree_map("[a-e]{1,2}", 1u32..10, 0..8).prop_map(|entries| ConceptList { entries })
        }

        proptest! {
            #[test]
            fn merge_is_commutative_associative_and_mass_preserving(a in list(), b in list(), c in list()) {
                prop_assert_eq!(merge_concept_lists(&a, &b), merge_concept_lists(&b, &a));
                prop_assert_eq!(
                    merge_concept_lists(&merge_concept_lists(&a, &b), &c),
                    merge_concept_lists(&a, &merge_concept_lists(&b, &c))
                );
                prop_assert_eq!(merge_concept_lists(&a, &b).mass(), a.mass() + b.mass());
            }

            #[test]
            fn extracted_terms_come_from_sentence(text in "[A-Za-z ]{0,60}") {
                let an = Arc::new(Analyzer::default());
                let ex = HeuristicExtractor::new(an.clone());
                let allowed: std::collections::HashSet<String> = an.terms(&text).into_iter().collect();
                for s in an.split_sentences(&text, "d", 0) {
                    let list = ex.extract(&s);
                    prop_assert!(list.iter().all(|(t, c)| c >= 1 && allowed.contains(t)));
                    prop_assert_eq!(list.clone(), ex.extract(&s));
                }
            }
        }
    }
}
