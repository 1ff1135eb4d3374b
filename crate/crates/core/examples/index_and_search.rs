//! Indexes the bundled fixture pages into a temporary store and runs a
//! keyword search.
//!
//! ```sh
//! cargo run --example index_and_search -- "engineering college"
//! ```

use std::sync::Arc;

use compsum::dom::load_document;
use compsum::pipeline::{doc_id_for_source, Indexer};
use compsum::search::SearchIndex;
use compsum::store::Store;
use compsum::text::Analyzer;

fn main() -> anyhow::Result<()> {
    let query = std::env::args().nth(1).unwrap_or_else(|| "engineering college".into());
    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path())?;
    let analyzer = Arc::new(Analyzer::default());
    let indexer = Indexer::with_analyzer(analyzer.clone());

    let mut pages: Vec<_> = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    pages.sort();
    for page in pages {
        let source = page.to_string_lossy();
        let rec = indexer.index(&load_document(&source, &doc_id_for_source(&source))?)?;
        println!(
            "indexed {:<12} {:>3} sentences, {} concept blocks",
            rec.doc_id,
            rec.sentences.len(),
            rec.concept_blocks.len()
        );
        store.store_document(&rec)?;
    }

    let index = SearchIndex::from_records(analyzer, &store.load_all()?);
    println!("\nresults for {query:?}:");
    for hit in index.search(&query, 10)? {
        println!(
            "{:>8.4}  {:<12} {}\n          {}",
            hit.score, hit.doc_id, hit.title, hit.snippet
        );
    }
    Ok(())
}
