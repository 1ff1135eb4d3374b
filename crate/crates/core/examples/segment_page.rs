//! Cleans and segments one page, printing its topic and concept blocks.
//!
//! ```sh
//! cargo run --example segment_page -- crates/core/fixtures/greenfield.html
//! ```

use std::sync::Arc;

use compsum::concepts::HeuristicExtractor;
use compsum::dom::{build_dom, clean_html, extract_micro_blocks, load_document};
use compsum::segment::{topic_block_similarity, Segmenter};
use compsum::text::Analyzer;

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/anna_valley.html").into());
    let raw = load_document(&path, "page")?;
    let tree = build_dom(&clean_html(&raw)?)?;
    let micro = extract_micro_blocks(&tree);
    println!("{} micro blocks", micro.len());

    let analyzer = Arc::new(Analyzer::default());
    let segmenter = Segmenter::new(analyzer.clone(), Arc::new(HeuristicExtractor::new(analyzer)));
    let (topics, concepts) = segmenter.segment(&micro);

    for tb in &topics {
        let path: Vec<String> = tb
            .parent_path
            .iter()
            .map(|s| format!("{}[{}]", s.tag, s.sibling_index))
            .collect();
        println!("\ntopic {} at /{} heading {:?}", tb.id, path.join("/"), tb.heading);
        for s in &tb.sentences {
            println!("  {:>3} {}", s.seq_no, s.text);
        }
        let concepts: Vec<String> = tb.concepts.iter().map(|(t, c)| format!("{t}:{c}")).collect();
        println!("  concepts {}", concepts.join(" "));
    }

    println!("\npairwise similarity");
    for a in &topics {
        let row: Vec<String> = topics
            .iter()
            .map(|b| format!("{:.2}", topic_block_similarity(a, b)))
            .collect();
        println!("  {:>2} {}", a.id, row.join(" "));
    }

    println!("\nconcept blocks (alpha {})", segmenter.alpha());
    for cb in &concepts {
        println!("  {} topics {:?} headings {:?}", cb.id, cb.topic_block_ids, cb.headings);
    }
    Ok(())
}
