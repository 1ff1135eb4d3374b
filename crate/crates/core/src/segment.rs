//! Concept-based segmentation.
//!
//! Micro blocks sharing a parent are grouped into topic blocks, topic
//! blocks are compared through their concept lists, and groups whose every
//! pair is more similar than the threshold become concept blocks.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concepts::{ConceptExtractor, ConceptList};
use crate::dom::{Emphasis, MicroBlock, PathStep};
use crate::text::{Analyzer, Sentence};

/// Default merge threshold.
pub const DEFAULT_ALPHA: f64 = 0.6;

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("term {0:?} is not in the concept list")]
    AbsentTerm(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicBlock {
    pub id: u32,
    pub doc_id: String,
    pub parent_path: Vec<PathStep>,
    pub micro_block_ids: Vec<u32>,
    pub sentences: Vec<Sentence>,
    pub concepts: ConceptList,
    /// First heading or caption under the parent, else the block's first sentence.
    pub heading: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptBlock {
    pub id: u32,
    pub doc_id: String,
    pub topic_block_ids: Vec<u32>,
    pub concepts: ConceptList,
    /// Sorted, no duplicates.
    pub sentence_refs: Vec<u32>,
    pub headings: Vec<String>,
}

/// Normalized weight of one concept: ctf over the length of the list's
/// frequency vector.
pub fn ctf_weight(concepts: &ConceptList, term: &str) -> Result<f64, SegmentError> {
    let ctf = concepts
        .get(term)
        .ok_or_else(|| SegmentError::AbsentTerm(term.to_string()))?;
    Ok(f64::from(ctf) / concepts.norm())
}

/// Concept-based similarity of two concept lists.
///
/// Over the shared terms, each side contributes Σ ctf·weight; the score is
/// one minus the absolute difference, clamped to [0, 1]. Lists with no
/// shared term score 0.
pub fn concept_similarity(a: &ConceptList, b: &ConceptList) -> f64 {
    let (norm_a, norm_b) = (a.norm(), b.norm());
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut shared = false;
    for (term, ctf_a) in a.iter() {
        let Some(ctf_b) = b.get(term) else { continue };
        shared = true;
        let (ctf_a, ctf_b) = (f64::from(ctf_a), f64::from(ctf_b));
        sum_a += ctf_a * (ctf_a / norm_a);
        sum_b += ctf_b * (ctf_b / norm_b);
    }
    if !shared {
        return 0.0;
    }
    (1.0 - (sum_a - sum_b).abs()).clamp(0.0, 1.0)
}

pub fn topic_block_similarity(a: &TopicBlock, b: &TopicBlock) -> f64 {
    concept_similarity(&a.concepts, &b.concepts)
}

/// Greedy complete-linkage agglomeration over `n` items.
///
/// Each step merges the two clusters whose weakest cross pair is strongest,
/// provided it is strictly above `alpha`. Ties go to the pair with the
/// lowest (smallest member, smallest member) key. Returned clusters are
/// sorted internally and ordered by their smallest member.
pub fn agglomerate(n: usize, sim: impl Fn(usize, usize) -> f64, alpha: f64) -> Vec<Vec<usize>> {
    let mut link: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        f64::NEG_INFINITY
                    } else {
                        sim(i.min(j), i.max(j))
                    }
                })
                .collect()
        })
        .collect();
    // Each cluster is keyed by its smallest member.
    let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    loop {
        let active: Vec<usize> = (0..n).filter(|&i| members[i].is_some()).collect();
        let mut best: Option<(usize, usize, f64)> = None;
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                let l = link[i][j];
                if l > alpha && best.is_none_or(|(_, _, b)| l > b) {
                    best = Some((i, j, l));
                }
            }
        }
        let Some((i, j, _)) = best else { break };
        for &k in &active {
            if k != i && k != j {
                let l = link[i][k].min(link[j][k]);
                link[i][k] = l;
                link[k][i] = l;
            }
        }
        let moved = members[j].take().expect("active cluster");
        let target = members[i].as_mut().expect("active cluster");
        target.extend(moved);
        target.sort_unstable();
    }
    members.into_iter().flatten().collect()
}

/// Merges topic blocks into concept blocks. Blocks of different documents
/// are never merged. Concept block ids follow the order of their first
/// topic block.
pub fn merge_into_concept_blocks(tbs: &[TopicBlock], alpha: f64) -> Vec<ConceptBlock> {
    let mut order: Vec<&TopicBlock> = tbs.iter().collect();
    order.sort_by(|a, b| (&a.doc_id, a.id).cmp(&(&b.doc_id, b.id)));
    let clusters = agglomerate(
        order.len(),
        |i, j| {
            if order[i].doc_id == order[j].doc_id {
                topic_block_similarity(order[i], order[j])
            } else {
                f64::NEG_INFINITY
            }
        },
        alpha,
    );
    clusters
        .into_iter()
        .enumerate()
        .map(|(id, members)| {
            let blocks: Vec<&TopicBlock> = members.iter().map(|&m| order[m]).collect();
            let mut concepts = ConceptList::new();
            let mut sentence_refs = Vec::new();
            for tb in &blocks {
                concepts.merge_from(&tb.concepts);
                sentence_refs.extend(tb.sentences.iter().map(|s| s.seq_no));
            }
            sentence_refs.sort_unstable();
            sentence_refs.dedup();
            ConceptBlock {
                id: id as u32,
                doc_id: blocks[0].doc_id.clone(),
                topic_block_ids: blocks.iter().map(|tb| tb.id).collect(),
                concepts,
                sentence_refs,
                headings: blocks.iter().filter_map(|tb| tb.heading.clone()).collect(),
            }
        })
        .collect()
}

/// Topic-block formation and concept-block merging for one document.
#[derive(Clone)]
pub struct Segmenter {
    analyzer: Arc<Analyzer>,
    extractor: Arc<dyn ConceptExtractor>,
    alpha: f64,
}

impl std::fmt::Debug for Segmenter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Segmenter")
            .field("extractor", &self.extractor.name())
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl Segmenter {
    pub fn new(analyzer: Arc<Analyzer>, extractor: Arc<dyn ConceptExtractor>) -> Self {
        Self {
            analyzer,
            extractor,
            alpha: DEFAULT_ALPHA,
        }
    }

    /// Panics unless `0 <= alpha <= 1`.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1], got {alpha}");
        self.alpha = alpha;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn extractor(&self) -> &dyn ConceptExtractor {
        self.extractor.as_ref()
    }

    /// Groups runs of adjacent micro blocks with identical parent paths.
    /// Each micro block is split into sentences on its own, numbered
    /// document-wide in micro block order.
    pub fn form_topic_blocks(&self, blocks: &[MicroBlock]) -> Vec<TopicBlock> {
        let mut next_seq = 0u32;
        let per_block: Vec<Vec<Sentence>> = blocks
            .iter()
            .map(|mb| {
                let mut sentences = self.analyzer.split_sentences(&mb.text, &mb.doc_id, next_seq);
                next_seq += sentences.len() as u32;
                for s in &mut sentences {
                    s.emphasis = mb.emphasis.clone();
                    s.sibling_index = mb.sibling_index;
                    s.sibling_count = mb.sibling_count;
                }
                sentences
            })
            .collect();

        let mut topics: Vec<TopicBlock> = Vec::new();
        for (mb, sentences) in blocks.iter().zip(&per_block) {
            let extend = topics
                .last()
                .is_some_and(|tb| tb.doc_id == mb.doc_id && tb.parent_path == mb.parent_path);
            if !extend {
                topics.push(TopicBlock {
                    id: topics.len() as u32,
                    doc_id: mb.doc_id.clone(),
                    parent_path: mb.parent_path.clone(),
                    micro_block_ids: Vec::new(),
                    sentences: Vec::new(),
                    concepts: ConceptList::new(),
                    heading: None,
                });
            }
            let tb = topics.last_mut().expect("just pushed");
            tb.micro_block_ids.push(mb.id);
            for s in sentences {
                tb.concepts.merge_from(&self.extractor.extract(s));
                tb.sentences.push(s.clone());
            }
        }

        for tb in &mut topics {
            let titled = blocks.iter().zip(&per_block).find(|(mb, sentences)| {
                !sentences.is_empty()
                    && mb.parent_path.starts_with(&tb.parent_path)
                    && (mb.emphasis.contains(&Emphasis::ParagraphTitle) || mb.emphasis.contains(&Emphasis::Caption))
            });
            tb.heading = titled
                .map(|(_, sentences)| sentences[0].text.clone())
                .or_else(|| tb.sentences.first().map(|s| s.text.clone()));
        }
        topics
    }

    /// Topic blocks and the concept blocks merged from them.
    pub fn segment(&self, blocks: &[MicroBlock]) -> (Vec<TopicBlock>, Vec<ConceptBlock>) {
        let topics = self.form_topic_blocks(blocks);
        let concepts = merge_into_concept_blocks(&topics, self.alpha);
        (topics, concepts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::HeuristicExtractor;
    use crate::dom::EmphasisSet;

    fn list(pairs: &[(&str, u32)]) -> ConceptList {
        ConceptList::from_pairs(pairs.iter().map(|&(t, c)| (t, c)))
    }

    fn segmenter() -> Segmenter {
        let a = Arc::new(Analyzer::default());
        Segmenter::new(a.clone(), Arc::new(HeuristicExtractor::new(a)))
    }

    fn path(steps: &[(&str, u32)]) -> Vec<PathStep> {
        steps
            .iter()
            .map(|&(tag, i)| PathStep {
                tag: tag.into(),
                sibling_index: i,
            })
            .collect()
    }

    fn micro(id: u32, p: &[(&str, u32)], text: &str, emphasis: &[Emphasis]) -> MicroBlock {
        MicroBlock {
            id,
            doc_id: "d".into(),
            parent_path: path(p),
            text: text.into(),
            sibling_index: 0,
            sibling_count: 1,
            emphasis: emphasis.iter().copied().collect::<EmphasisSet>(),
        }
    }

    #[test]
    fn ctf_weight_examples() {
        assert_eq!(ctf_weight(&list(&[("a", 5)]), "a").unwrap(), 1.0);
        let l = list(&[("a", 3), ("b", 4)]);
        assert!((ctf_weight(&l, "a").unwrap() - 0.6).abs() < 1e-12);
        assert!((ctf_weight(&l, "b").unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(ctf_weight(&l, "c"), Err(SegmentError::AbsentTerm("c".into())));
    }

    #[test]
    fn similarity_examples() {
        let x = list(&[("a", 2), ("b", 1)]);
        assert_eq!(concept_similarity(&x, &x), 1.0);
        assert_eq!(concept_similarity(&x, &list(&[("c", 1)])), 0.0);
        // 1 - |2·(2/√5) - 1·(1/√2)| = -0.0818 before clamping.
        assert_eq!(concept_similarity(&x, &list(&[("a", 1), ("c", 1)])), 0.0);
        assert_eq!(concept_similarity(&ConceptList::new(), &ConceptList::new()), 0.0);
    }

    #[test]
    fn agglomerate_examples() {
        assert_eq!(agglomerate(3, |_, _| 0.0, 0.6), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(agglomerate(2, |_, _| 1.0, 0.6), vec![vec![0, 1]]);
        // A~B = 0.9, B~C = 0.9, A~C = 0.1
        let chain = |i: usize, j: usize| if (i, j) == (0, 2) || (i, j) == (2, 0) { 0.1 } else { 0.9 };
        assert_eq!(agglomerate(3, chain, 0.6), vec![vec![0, 1], vec![2]]);
        // Threshold is strict.
        assert_eq!(agglomerate(2, |_, _| 0.6, 0.6), vec![vec![0], vec![1]]);
    }

    #[test]
    fn topic_blocks_need_adjacency() {
        let seg = segmenter();
        let p = [("body", 0), ("div", 0)];
        let q = [("body", 0), ("div", 1)];
        let tbs = seg.form_topic_blocks(&[
            micro(0, &p, "One here.", &[]),
            micro(1, &q, "Two here.", &[]),
            micro(2, &p, "Three here.", &[]),
        ]);
        assert_eq!(tbs.len(), 3);
        let single = seg.form_topic_blocks(&[micro(0, &p, "Alone. Again.", &[])]);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].micro_block_ids, vec![0]);
        assert_eq!(single[0].sentences.len(), 2);
    }

    #[test]
    fn figure_one_topic_blocks() {
        let seg = segmenter();
        let t1 = [("body", 0), ("div", 0)];
        let t2 = [("body", 0), ("div", 1)];
        let mbs: Vec<_> = (0..6)
            .map(|i| micro(i, if i < 4 { &t1 } else { &t2 }, &format!("Content c{}.", i + 1), &[]))
            .collect();
        let tbs = seg.form_topic_blocks(&mbs);
        assert_eq!(tbs.len(), 2);
        assert_eq!(tbs[0].micro_block_ids, vec![0, 1, 2, 3]);
        assert_eq!(tbs[1].micro_block_ids, vec![4, 5]);
        let seqs: Vec<u32> = tbs
            .iter()
            .flat_map(|tb| tb.sentences.iter().map(|s| s.seq_no))
            .collect();
        assert_eq!(seqs, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn heading_prefers_titles_in_parent_subtree() {
        let seg = segmenter();
        let dept = [("body", 0), ("div", 0)];
        let inner = [("body", 0), ("div", 0), ("ul", 2)];
        let tbs = seg.form_topic_blocks(&[
            micro(0, &dept, "CSE", &[Emphasis::ParagraphTitle]),
            micro(1, &dept, "Placement is strong. Many firms visit.", &[]),
            micro(2, &inner, "Infosys", &[]),
            micro(3, &[("body", 0)], "Footer text here.", &[]),
        ]);
        assert_eq!(tbs.len(), 3);
        assert_eq!(tbs[0].heading.as_deref(), Some("CSE"));
        assert_eq!(tbs[1].heading.as_deref(), Some("Infosys"));
        // The body subtree contains the CSE heading.
        assert_eq!(tbs[2].heading.as_deref(), Some("CSE"));
    }

    #[test]
    fn concept_blocks_aggregate_members() {
        let seg = segmenter();
        let a = [("body", 0), ("div", 0)];
        let b = [("body", 0), ("div", 1)];
        let c = [("body", 0), ("div", 2)];
        let (tbs, cbs) = seg.segment(&[
            micro(0, &a, "The cell trains students.", &[]),
            micro(1, &b, "Hostel rooms house guests.", &[]),
            micro(2, &c, "The cell trains students.", &[]),
        ]);
        assert_eq!(tbs.len(), 3);
        assert_eq!(cbs.len(), 2);
        assert_eq!(cbs[0].topic_block_ids, vec![0, 2]);
        assert_eq!(cbs[0].sentence_refs, vec![0, 2]);
        assert_eq!(cbs[0].concepts.get("train"), Some(2));
        assert_eq!(cbs[1].topic_block_ids, vec![1]);
    }
}
