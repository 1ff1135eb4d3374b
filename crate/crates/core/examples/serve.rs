//! Indexes the fixtures into a temporary store and serves it.
//!
//! ```sh
//! cargo run --example serve
//! curl -s localhost:8080/api/documents
//! curl -s -XPOST localhost:8080/api/summarize -H 'content-type: application/json' \
//!   -d '{"doc_ids":["hilltop","riverside"],"query":"engineering college","features":["placement","recruiters"]}'
//! ```
//! The browser page is at http://localhost:8080/ui/.

use std::sync::Arc;

use compsum::dom::load_document;
use compsum::pipeline::{doc_id_for_source, Indexer};
use compsum::service::{serve, AppState};
use compsum::store::Store;
use compsum::text::Analyzer;

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_env_filter("compsum=info").init();
    let dir = tempfile::tempdir()?;
    let store = Arc::new(Store::open(dir.path())?);
    let analyzer = Arc::new(Analyzer::default());
    let indexer = Indexer::with_analyzer(analyzer.clone());
    for entry in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))? {
        let source = entry?.path().to_string_lossy().into_owned();
        store.store_document(&indexer.index(&load_document(&source, &doc_id_for_source(&source))?)?)?;
    }
    let port = std::env::var("PORT").ok().and_then(|p| p.parse().ok()).unwrap_or(8080);
    let state = AppState::new(store, analyzer).with_ui_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/ui"));
    serve(([127, 0, 0, 1], port).into(), Arc::new(state)).await?;
    Ok(())
}
