//! Concept lists of two short passages, their weights and their similarity.
//!
//! ```sh
//! cargo run --example concept_similarity
//! ```

use std::sync::Arc;

use compsum::concepts::{merge_concept_lists, ConceptExtractor, ConceptList, HeuristicExtractor};
use compsum::segment::{concept_similarity, ctf_weight};
use compsum::text::Analyzer;

fn concepts(extractor: &HeuristicExtractor, analyzer: &Analyzer, text: &str) -> ConceptList {
    analyzer
        .split_sentences(text, "demo", 0)
        .iter()
        .map(|s| extractor.extract(s))
        .fold(ConceptList::new(), |acc, l| merge_concept_lists(&acc, &l))
}

fn show(name: &str, list: &ConceptList) {
    println!("{name}:");
    for (term, ctf) in list.iter() {
        println!("  {term:<12} ctf {ctf}  weight {:.3}", ctf_weight(list, term).unwrap());
    }
}

fn main() {
    let analyzer = Arc::new(Analyzer::default());
    let extractor = HeuristicExtractor::new(analyzer.clone());

    let a = concepts(
        &extractor,
        &analyzer,
        "The placement cell trains students for interviews. Recruiters visit the campus every year.",
    );
    let b = concepts(
        &extractor,
        &analyzer,
        "The placement cell trains students for coding rounds. Recruiters visit the campus in March.",
    );
    let c = concepts(
        &extractor,
        &analyzer,
        "Hostel rooms are allotted on a first come first served basis.",
    );

    show("a", &a);
    show("b", &b);
    show("c", &c);
    println!("sim(a, b) = {:.4}", concept_similarity(&a, &b));
    println!("sim(a, c) = {:.4}", concept_similarity(&a, &c));
    println!("sim(a, a) = {:.4}", concept_similarity(&a, &a));
}
