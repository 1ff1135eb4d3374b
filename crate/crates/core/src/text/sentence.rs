use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dom::EmphasisSet;

/// Words that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "approx", "co", "dept", "dr", "e.g", "etc", "fig", "i.e", "inc", "jr", "ltd", "mr", "mrs", "ms", "no", "nos",
    "pvt", "prof", "sr", "st", "vol", "vs",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    /// Document-wide, 0-based.
    pub seq_no: u32,
    pub text: String,
    pub tokens: Vec<String>,
    pub emphasis: EmphasisSet,
    pub sibling_index: u32,
    pub sibling_count: u32,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Byte ranges of the sentences in `text`.
///
/// A boundary is a run of `.`, `!` or `?` (plus closing quotes/brackets)
/// followed by whitespace and an uppercase letter or digit. A lone period
/// after a listed abbreviation is not a boundary. Fragments without any
/// alphanumeric character are folded into a neighbouring sentence, so
/// every returned span has at least one token.
pub fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let mut raw = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?') {
            j += 1;
        }
        let lone_period = j == i + 1 && c == '.';
        while j < chars.len() && CLOSERS.contains(&chars[j].1) {
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let next_starts_sentence =
            k > j && k < chars.len() && (chars[k].1.is_uppercase() || chars[k].1.is_ascii_digit());
        if next_starts_sentence && !(lone_period && is_abbreviation(&text[start..pos])) {
            raw.push(start..end);
            start = chars[k].0;
            i = k;
        } else {
            i = j.max(i + 1);
        }
    }
    if start < text.len() {
        raw.push(start..text.len());
    }

    let mut spans: Vec<Range<usize>> = Vec::with_capacity(raw.len());
    let mut pending: Option<usize> = None;
    for span in raw {
        let span = trim_span(text, span);
        if span.is_empty() {
            continue;
        }
        if !text[span.clone()].chars().any(char::is_alphanumeric) {
            match spans.last_mut() {
                Some(prev) => prev.end = span.end,
                None => pending = Some(pending.unwrap_or(span.start)),
            }
            continue;
        }
        let start = pending.take().unwrap_or(span.start);
        spans.push(start..span.end);
    }
    spans
}

fn trim_span(text: &str, span: Range<usize>) -> Range<usize> {
    let s = &text[span.clone()];
    let lead = s.len() - s.trim_start().len();
    let trail = s.len() - s.trim_end().len();
    if lead == s.len() {
        return span.start..span.start;
    }
    span.start + lead..span.end - trail
}

fn is_abbreviation(before: &str) -> bool {
    let word = before.rsplit(char::is_whitespace).next().unwrap_or("");
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(text: &str) -> Vec<&str> {
        sentence_spans(text).into_iter().map(|r| &text[r]).collect()
    }

    #[test]
    fn basic_boundaries() {
        assert_eq!(split("A is good. B is bad."), ["A is good.", "B is bad."]);
        assert_eq!(split("Really?! Yes. 5 more."), ["Really?!", "Yes.", "5 more."]);
        assert!(split("").is_empty());
        assert!(split("   ").is_empty());
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(split("Dr. Smith teaches."), ["Dr. Smith teaches."]);
        assert_eq!(split("Rooms, labs etc. Are listed."), ["Rooms, labs etc. Are listed."]);
        assert_eq!(split("See No. 5 today. Then go."), ["See No. 5 today.", "Then go."]);
    }

    #[test]
    fn lowercase_continuation_is_not_a_boundary() {
        assert_eq!(
            split("Version 2.0 ships. it is fine."),
            ["Version 2.0 ships. it is fine."]
        );
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        assert_eq!(split("He said \"go.\" Then left."), ["He said \"go.\"", "Then left."]);
    }

    #[test]
    fn tokenless_fragments_are_folded() {
        assert_eq!(split("Intro. ... More text."), ["Intro. ...", "More text."]);
        assert_eq!(split("-- ! Real one."), ["-- ! Real one."]);
        assert!(split("... !!").is_empty());
    }
}
