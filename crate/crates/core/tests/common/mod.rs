#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use compsum::concepts::ConceptList;
use compsum::dom::{load_document, Emphasis, EmphasisSet};
use compsum::pipeline::{doc_id_for_source, Indexer};
use compsum::segment::ConceptBlock;
use compsum::store::{DocumentRecord, Store, StoredSentence};
use compsum::text::Analyzer;
use proptest::prelude::*;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Fixture pages in name order.
pub fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "html"))
        .collect();
    paths.sort();
    paths
}

/// Indexes every fixture into a fresh store.
pub fn indexed_fixtures(analyzer: Arc<Analyzer>) -> (tempfile::TempDir, Arc<Store>) {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(dir.path()).unwrap());
    let indexer = Indexer::with_analyzer(analyzer);
    for path in fixture_paths() {
        let source = path.to_string_lossy().into_owned();
        let raw = load_document(&source, &doc_id_for_source(&source)).unwrap();
        store.store_document(&indexer.index(&raw).unwrap()).unwrap();
    }
    (dir, store)
}

fn emphasis() -> impl Strategy<Value = EmphasisSet> {
    proptest::collection::btree_set(
        prop_oneof![
            Just(Emphasis::Bold),
            Just(Emphasis::Underline),
            Just(Emphasis::Italics),
            Just(Emphasis::Caption),
            Just(Emphasis::ParagraphTitle),
            Just(Emphasis::ColorChange),
        ],
        0..3,
    )
}

fn sentence() -> impl Strategy<Value = StoredSentence> {
    (
        "\\PC{1,60}",
        emphasis(),
        0u32..6,
        1u32..6,
        proptest::option::of("[A-Za-z ]{1,12}"),
    )
        .prop_map(|(text, emphasis, idx, count, heading)| StoredSentence {
            text,
            emphasis,
            sibling_index: idx % count,
            sibling_count: count,
            heading,
        })
}

/// Valid records: dense sentence keys, blocks that partition the
/// sentences, positive ctfs.
pub fn arb_record() -> impl Strategy<Value = DocumentRecord> {
    (
        "[a-z0-9][a-z0-9_-]{0,15}",
        "\\PC{0,40}",
        proptest::collection::vec(sentence(), 1..12),
        proptest::collection::vec(proptest::collection::btree_map("[a-z]{2,6}", 1u32..10, 1..6), 1..4),
        0i64..2_000_000_000,
    )
        .prop_map(|(doc_id, title, sentences, lists, secs)| {
            let n = sentences.len();
            let blocks = lists.len().min(n);
            let sentences: BTreeMap<u32, StoredSentence> =
                sentences.into_iter().enumerate().map(|(i, s)| (i as u32, s)).collect();
            let concept_blocks = lists
                .into_iter()
                .take(blocks)
                .enumerate()
                .map(|(b, entries)| ConceptBlock {
                    id: b as u32,
                    doc_id: doc_id.clone(),
                    topic_block_ids: vec![b as u32],
                    concepts: ConceptList::from_pairs(entries),
                    sentence_refs: (0..n as u32).filter(|s| *s as usize % blocks == b).collect(),
                    headings: vec![format!("h{b}")],
                })
                .collect();
            DocumentRecord {
                source: format!("{doc_id}.html"),
                doc_id,
                title,
                sentences,
                concept_blocks,
                indexed_at: Utc.timestamp_opt(secs, 0).unwrap(),
                pipeline_version: "test".into(),
            }
        })
}

/// A valid record whose size grows with `n`.
pub fn record_with_sentences(doc_id: &str, n: u32) -> DocumentRecord {
    let sentences: BTreeMap<u32, StoredSentence> = (0..n)
        .map(|i| {
            (
                i,
                StoredSentence {
                    text: format!("Sentence number {i} about placement and recruiters."),
                    emphasis: EmphasisSet::new(),
                    sibling_index: i,
                    sibling_count: n,
                    heading: Some("Placement".into()),
                },
            )
        })
        .collect();
    DocumentRecord {
        doc_id: doc_id.into(),
        source: format!("{doc_id}.html"),
        title: format!("Version {n}"),
        sentences,
        concept_blocks: vec![ConceptBlock {
            id: 0,
            doc_id: doc_id.into(),
            topic_block_ids: vec![0],
            concepts: ConceptList::from_pairs([("placement", n), ("recruit", n)]),
            sentence_refs: (0..n).collect(),
            headings: vec!["Placement".into()],
        }],
        indexed_at: Utc.timestamp_opt(1_700_000_000 + i64::from(n), 0).unwrap(),
        pipeline_version: "test".into(),
    }
}
