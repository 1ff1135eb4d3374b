//! Output formats for a [`ComparativeSummary`].

use std::fmt::Write;

use html_escape::encode_text;

use crate::summarize::ComparativeSummary;

/// A self-contained page: one table, a column per document, no scripts.
pub fn render_html(summary: &ComparativeSummary) -> String {
    let mut out = String::new();
    let heading = format!("{} | {}", summary.query, summary.features.join(", "));
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>Comparison: {}</title>", encode_text(&heading));
    out.push_str(
        "<style>table{border-collapse:collapse}th,td{border:1px solid #999;padding:6px;vertical-align:top}</style>\n",
    );
    out.push_str("</head>\n<body>\n");
    let _ = writeln!(out, "<h1>{}</h1>", encode_text(&heading));
    out.push_str("<table>\n<tr>");
    for col in &summary.columns {
        let _ = write!(out, "<th>{}</th>", encode_text(&col.title));
    }
    out.push_str("</tr>\n<tr>");
    for col in &summary.columns {
        out.push_str("<td>");
        for section in &col.sections {
            let _ = write!(out, "<p><b>{}</b></p>", encode_text(&section.subtitle));
            for s in &section.sentences {
                let _ = write!(out, "<p>{}</p>", encode_text(&s.text));
            }
        }
        out.push_str("</td>");
    }
    out.push_str("</tr>\n</table>\n</body>\n</html>\n");
    out
}

pub fn render_json(summary: &ComparativeSummary) -> String {
    serde_json::to_string_pretty(summary).expect("summaries serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Html,
    Json,
}

impl Format {
    pub fn render(self, summary: &ComparativeSummary) -> String {
        match self {
            Format::Html => render_html(summary),
            Format::Json => render_json(summary),
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            Format::Html => "text/html; charset=utf-8",
            Format::Json => "application/json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "html" => Ok(Format::Html),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}, expected html or json")),
        }
    }
}
