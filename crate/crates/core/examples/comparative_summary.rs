//! Builds a side-by-side summary of three fixture pages and writes it as
//! HTML.
//!
//! ```sh
//! cargo run --example comparative_summary -- placement,recruiters /tmp/compare.html
//! ```

use std::sync::Arc;

use compsum::dom::load_document;
use compsum::pipeline::Indexer;
use compsum::render::render_html;
use compsum::summarize::{Budget, FeatureQuery, Summarizer, WeightParams};
use compsum::text::Analyzer;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let features: Vec<String> = args
        .next()
        .unwrap_or_else(|| "placement,recruiters".into())
        .split(',')
        .map(str::to_string)
        .collect();
    let out = args.next();

    let analyzer = Arc::new(Analyzer::default());
    let indexer = Indexer::with_analyzer(analyzer.clone());
    let records = ["anna_valley", "greenfield", "sri_lakshmi"]
        .iter()
        .map(|id| {
            let path = format!("{}/fixtures/{id}.html", env!("CARGO_MANIFEST_DIR"));
            Ok(indexer.index(&load_document(&path, id)?)?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let query = FeatureQuery::new(&analyzer, "engineering college", &features, None)?;
    let params = WeightParams {
        budget: Budget::MaxSentences(4),
        skip_headings: true,
        ..Default::default()
    };
    let summary = Summarizer::new(analyzer, query, params)?.compare(&records)?;

    for col in &summary.columns {
        println!("{}", col.title);
        for section in &col.sections {
            println!("  [{}]", section.subtitle);
            for s in &section.sentences {
                println!("    {:.3}  {}", s.score, s.text);
            }
        }
    }
    if let Some(path) = out {
        std::fs::write(&path, render_html(&summary))?;
        println!("wrote {path}");
    }
    Ok(())
}
