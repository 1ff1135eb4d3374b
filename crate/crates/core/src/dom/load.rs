use std::collections::HashMap;
use std::path::Path;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use chrono::Utc;
use encoding_rs::{Encoding, UTF_8};

use super::{IngestError, RawDocument};

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub timeout: Duration,
    /// Minimum spacing between two requests to the same host.
    pub politeness_delay: Duration,
    pub user_agent: String,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(15),
            politeness_delay: Duration::from_millis(500),
            user_agent: concat!("compsum/", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

/// Loads documents from local paths or `http(s)://` URLs.
#[derive(Debug, Default)]
pub struct Loader {
    config: FetchConfig,
    client: OnceLock<reqwest::blocking::Client>,
    last_hit: Mutex<HashMap<String, Instant>>,
}

/// Loads with the default [`FetchConfig`].
pub fn load_document(source: &str, doc_id: &str) -> Result<RawDocument, IngestError> {
    Loader::default().load(source, doc_id)
}

impl Loader {
    pub fn new(config: FetchConfig) -> Self {
        Self {
            config,
            ..Default::default()
        }
    }

    pub fn load(&self, source: &str, doc_id: &str) -> Result<RawDocument, IngestError> {
        let (bytes, declared) = if is_url(source) {
            self.fetch(source)?
        } else {
            let bytes = std::fs::read(Path::new(source)).map_err(|error| IngestError::Io {
                path: source.to_string(),
                error,
            })?;
            (bytes, None)
        };
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(IngestError::EmptyDocument(source.to_string()));
        }
        let bytes = to_utf8(bytes, declared.as_deref(), source)?;
        Ok(RawDocument {
            doc_id: doc_id.to_string(),
            source: source.to_string(),
            bytes,
            fetched_at: Utc::now(),
        })
    }

    fn client(&self) -> Result<&reqwest::blocking::Client, IngestError> {
        if let Some(c) = self.client.get() {
            return Ok(c);
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(self.config.timeout)
            .user_agent(self.config.user_agent.clone())
            .build()
            .map_err(|e| IngestError::Fetch {
                source_ref: "client".into(),
                message: e.to_string(),
            })?;
        Ok(self.client.get_or_init(|| client))
    }

    fn fetch(&self, source: &str) -> Result<(Vec<u8>, Option<String>), IngestError> {
        let fetch_err = |message: String| IngestError::Fetch {
            source_ref: source.to_string(),
            message,
        };
        let url = url::Url::parse(source).map_err(|e| fetch_err(e.to_string()))?;
        self.wait_for_host(url.host_str().unwrap_or_default());

        let resp = self.client()?.get(url).send().map_err(|e| fetch_err(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(fetch_err(format!("HTTP {}", resp.status())));
        }
        let charset = resp
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .and_then(charset_param);
        let body = resp.bytes().map_err(|e| fetch_err(e.to_string()))?;
        Ok((body.to_vec(), charset))
    }

    fn wait_for_host(&self, host: &str) {
        let delay = self.config.politeness_delay;
        let wait = {
            let mut hits = self.last_hit.lock().unwrap_or_else(|p| p.into_inner());
            let now = Instant::now();
            let wait = hits
                .get(host)
                .map(|last| delay.saturating_sub(now.duration_since(*last)))
                .unwrap_or_default();
            hits.insert(host.to_string(), now + wait);
            wait
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

fn is_url(source: &str) -> bool {
    let lower = source.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://")
}

fn charset_param(content_type: &str) -> Option<String> {
    content_type.split(';').skip(1).find_map(|p| {
        let (k, v) = p.split_once('=')?;
        k.trim()
            .eq_ignore_ascii_case("charset")
            .then(|| v.trim().trim_matches('"').to_string())
    })
}

/// Looks for `charset=` in the first 2 KiB, covering both
/// `<meta charset=..>` and the `http-equiv` form.
fn sniff_meta_charset(bytes: &[u8]) -> Option<String> {
    let head = &bytes[..bytes.len().min(2048)];
    let lower: Vec<u8> = head.iter().map(u8::to_ascii_lowercase).collect();
    let at = lower.windows(8).position(|w| w == b"charset=")? + 8;
    let rest = &head[at..];
    let rest = rest
        .strip_prefix(b"\"")
        .or_else(|| rest.strip_prefix(b"'"))
        .unwrap_or(rest);
    let end = rest
        .iter()
        .position(|b| !(b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b':' | b'.')))
        .unwrap_or(rest.len());
    (end > 0).then(|| String::from_utf8_lossy(&rest[..end]).into_owned())
}

/// UTF-8 passes through (minus a BOM); a declared non-UTF-8 charset is
/// transcoded; anything else is rejected.
fn to_utf8(bytes: Vec<u8>, declared: Option<&str>, source: &str) -> Result<Vec<u8>, IngestError> {
    let encoding_err = |message: String| IngestError::Encoding {
        source_ref: source.to_string(),
        message,
    };
    let declared = declared.map(str::to_string).or_else(|| sniff_meta_charset(&bytes));
    let encoding = declared.as_deref().and_then(|l| Encoding::for_label(l.as_bytes()));
    match encoding {
        Some(enc) if enc != UTF_8 => {
            let (text, _, had_errors) = enc.decode(&bytes);
            if had_errors {
                return Err(encoding_err(format!("malformed {} content", enc.name())));
            }
            Ok(text.into_owned().into_bytes())
        }
        _ => {
            let body = bytes.strip_prefix(b"\xEF\xBB\xBF").map(<[u8]>::to_vec).unwrap_or(bytes);
            match String::from_utf8(body) {
                Ok(s) => Ok(s.into_bytes()),
                Err(_) => Err(encoding_err(match declared {
                    Some(l) => format!("unsupported or mismatched charset {l:?}"),
                    None => "not UTF-8 and no charset declared".to_string(),
                })),
            }
        }
    }
}
