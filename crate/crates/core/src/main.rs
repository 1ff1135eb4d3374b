use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use compsum::dom::Loader;
use compsum::pipeline::{doc_id_for_source, Indexer};
use compsum::render::Format;
use compsum::service::{self, ApiError, AppState, SearchRequest, SummarizeRequest};
use compsum::store::Store;
use compsum::summarize::SynonymLexicon;
use compsum::text::Analyzer;

#[derive(Parser)]
#[command(name = "compsum", version, about = "Comparative summaries of web pages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StoreArg {
    /// Document store directory.
    #[arg(long, env = "STORE_DIR")]
    store: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, segment and store pages; prints one doc id per page.
    Index {
        /// Local paths or http(s) URLs.
        #[arg(required = true)]
        sources: Vec<String>,
        #[command(flatten)]
        store: StoreArg,
        /// Merge threshold for concept blocks.
        #[arg(long, default_value_t = compsum::segment::DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Keyword search over the store.
    Search {
        query: String,
        #[command(flatten)]
        store: StoreArg,
        #[arg(long, default_value_t = service::DEFAULT_SEARCH_LIMIT)]
        limit: usize,
        /// Print results as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Side-by-side summary of stored documents.
    Summarize {
        #[command(flatten)]
        store: StoreArg,
        /// Document ids, in column order.
        #[arg(long, value_delimiter = ',', required = true)]
        docs: Vec<String>,
        #[arg(long, default_value = "")]
        query: String,
        #[arg(long, value_delimiter = ',', required = true)]
        features: Vec<String>,
        #[arg(long, conflicts_with = "ratio")]
        sentences: Option<usize>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        alpha_tag: Option<f64>,
        #[arg(long)]
        beta_loc: Option<f64>,
        /// Leave out sentences that only repeat their section heading.
        #[arg(long)]
        skip_headings: bool,
        #[arg(long, default_value = "html")]
        format: Format,
        /// Synonym groups, one per line.
        #[arg(long)]
        synonyms: Option<PathBuf>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Static files served under /ui.
        #[arg(long, env = "UI_DIR")]
        ui_dir: Option<PathBuf>,
        #[arg(long)]
        synonyms: Option<PathBuf>,
    },
}

/// A one-line diagnostic and exit status.
struct Failure(String, u8);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let code = if e.status.as_u16() == 404 {
            3
        } else if e.status.is_client_error() {
            2
        } else {
            1
        };
        Failure(e.body.error, code)
    }
}

fn fail(e: impl std::fmt::Display) -> Failure {
    Failure(e.to_string(), 1)
}

fn open_store(arg: &StoreArg) -> Result<Arc<Store>, Failure> {
    Ok(Arc::new(Store::open(&arg.store).map_err(fail)?))
}

fn load_synonyms(path: Option<&PathBuf>, analyzer: &Analyzer) -> Result<Option<SynonymLexicon>, Failure> {
    path.map(|p| SynonymLexicon::from_file(p, analyzer).map_err(|e| fail(format!("{}: {e}", p.display()))))
        .transpose()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let analyzer = Arc::new(Analyzer::default());
    match cli.command {
        Command::Index { sources, store, alpha } => {
            let store = open_store(&store)?;
            let segmenter = Indexer::with_analyzer(analyzer).segmenter().clone().with_alpha(alpha);
            let indexer = Indexer::new(segmenter);
            let loader = Loader::default();
            for source in sources {
                let doc_id = doc_id_for_source(&source);
                let raw = loader.load(&source, &doc_id).map_err(fail)?;
                let rec = indexer.index(&raw).map_err(fail)?;
                store.store_document(&rec).map_err(fail)?;
                println!("{doc_id}");
            }
        }
        Command::Search {
            query,
            store,
            limit,
            json,
        } => {
            let state = AppState::new(open_store(&store)?, analyzer);
            let hits = state.search(&SearchRequest { query, limit })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&hits).map_err(fail)?);
            } else {
                for h in hits {
                    println!("{:.4}\t{}\t{}\n\t{}", h.score, h.doc_id, h.title, h.snippet);
                }
            }
        }
        Command::Summarize {
            store,
            docs,
            query,
            features,
            sentences,
            ratio,
            gamma,
            alpha_tag,
            beta_loc,
            skip_headings,
            format,
            synonyms,
            out,
        } => {
            let mut state = AppState::new(open_store(&store)?, analyzer.clone());
            if let Some(lex) = load_synonyms(synonyms.as_ref(), &analyzer)? {
                state = state.with_synonyms(lex);
            }
            let req = SummarizeRequest {
                doc_ids: docs,
                query,
                features,
                max_sentences: sentences,
                ratio,
                gamma,
                alpha_tag,
                beta_loc,
                skip_headings,
            };
            let body = state.summarize(&req, format)?;
            match out {
                Some(path) => std::fs::write(&path, body).map_err(|e| fail(format!("{}: {e}", path.display())))?,
                None => print!("{body}"),
            }
        }
        Command::Serve {
            store,
            port,
            host,
            ui_dir,
            synonyms,
        } => {
            let mut state = AppState::new(open_store(&store)?, analyzer.clone());
            if let Some(lex) = load_synonyms(synonyms.as_ref(), &analyzer)? {
                state = state.with_synonyms(lex);
            }
            let bundled = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/ui"));
            if let Some(dir) = ui_dir.or_else(|| bundled.is_dir().then_some(bundled)) {
                state = state.with_ui_dir(dir);
            }
            let runtime = tokio::runtime::Runtime::new().map_err(fail)?;
            runtime
                .block_on(service::serve(SocketAddr::new(host, port), Arc::new(state)))
                .map_err(fail)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "compsum=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
