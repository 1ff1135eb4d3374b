use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const BUNDLED_VERBS: &str = include_str!("../../data/verbs.txt");

/// Inflection suffixes tried when a token is not itself in the verb lexicon.
const VERB_SUFFIXES: [&str; 5] = ["ing", "ed", "es", "s", "d"];

/// Stopword list and closed verb lexicon used by tokenization and the
/// default concept extractor.
#[derive(Debug, Clone)]
pub struct Lexicon {
    stopwords: HashSet<String>,
    verbs: HashSet<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Lexicon {
    /// The word lists shipped in `data/`.
    pub fn bundled() -> Self {
        Self {
            stopwords: parse_word_list(BUNDLED_STOPWORDS),
            verbs: parse_word_list(BUNDLED_VERBS),
        }
    }

    /// Loads either list from a file, falling back to the bundled copy for
    /// whichever path is `None`.
    pub fn from_files(stopwords: Option<&Path>, verbs: Option<&Path>) -> io::Result<Self> {
        let stopwords = match stopwords {
            Some(p) => parse_word_list(&fs::read_to_string(p)?),
            None => parse_word_list(BUNDLED_STOPWORDS),
        };
        let verbs = match verbs {
            Some(p) => parse_word_list(&fs::read_to_string(p)?),
            None => parse_word_list(BUNDLED_VERBS),
        };
        Ok(Self { stopwords, verbs })
    }

    pub fn from_words<I, J, S, T>(stopwords: I, verbs: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        Self {
            stopwords: stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
            verbs: verbs.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Lexicon lookup, then suffix stripping against a known stem. Handles
    /// a dropped final `e` ("providing") and a doubled consonant ("planned").
    pub fn is_verb(&self, token: &str) -> bool {
        if self.verbs.contains(token) {
            return true;
        }
        for suffix in VERB_SUFFIXES {
            let Some(stem) = token.strip_suffix(suffix) else {
                continue;
            };
            if stem.len() < 2 {
                continue;
            }
            if self.verbs.contains(stem) {
                return true;
            }
            if matches!(suffix, "ing" | "ed") {
                if self.verbs.contains(&format!("{stem}e")) {
                    return true;
                }
                let b = stem.as_bytes();
                if b.len() >= 3 && b[b.len() - 1] == b[b.len() - 2] && self.verbs.contains(&stem[..stem.len() - 1]) {
                    return true;
                }
            }
        }
        false
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }
}

/// One entry per line; blank lines and `#` comments are skipped.
pub fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}
