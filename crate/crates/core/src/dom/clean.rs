use ego_tree::NodeRef;
use scraper::{Html, Node};

use super::{IngestError, RawDocument};
use crate::text::normalize_whitespace;

/// Elements dropped together with their content.
pub const REMOVED_ELEMENTS: &[&str] = &["meta", "script", "style", "noscript", "iframe", "link"];

/// Layout-only attributes.
const PRESENTATION_ATTRS: &[&str] = &[
    "align",
    "background",
    "bgcolor",
    "border",
    "cellpadding",
    "cellspacing",
    "clear",
    "face",
    "height",
    "hspace",
    "nowrap",
    "size",
    "valign",
    "vspace",
    "width",
];

/// Style declarations that record emphasis; every other declaration is dropped.
const EMPHASIS_STYLE_PROPS: &[&str] = &["color", "font-weight", "font-style", "text-decoration"];

const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link", "meta", "param", "source", "track",
    "wbr",
];

/// Strips non-content markup and re-serializes the repaired document.
///
/// Text of every retained element is kept byte-for-byte, and cleaning an
/// already cleaned document returns it unchanged.
pub fn clean_html(doc: &RawDocument) -> Result<RawDocument, IngestError> {
    let html = Html::parse_document(doc.html()?);
    let mut out = String::with_capacity(doc.bytes.len());
    for child in html.tree.root().children() {
        serialize(child, &mut out);
    }

    let body_text = Html::parse_document(&out)
        .tree
        .root()
        .descendants()
        .find(|n| n.value().as_element().is_some_and(|e| e.name() == "body"))
        .map(|body| normalize_whitespace(&retained_text_of(body)))
        .unwrap_or_default();
    if body_text.is_empty() {
        return Err(IngestError::EmptyAfterClean(doc.doc_id.clone()));
    }

    Ok(RawDocument {
        bytes: out.into_bytes(),
        ..doc.clone()
    })
}

/// Concatenated text of every node outside the removed elements, in
/// document order. Cleaning preserves this string exactly.
pub fn retained_text(html: &str) -> String {
    retained_text_of(Html::parse_document(html).tree.root())
}

fn retained_text_of(node: NodeRef<'_, Node>) -> String {
    let mut out = String::new();
    collect_text(node, &mut out);
    out
}

fn collect_text(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(e) if REMOVED_ELEMENTS.contains(&e.name()) => {}
        _ => node.children().for_each(|c| collect_text(c, out)),
    }
}

fn serialize(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Doctype(_) => out.push_str("<!DOCTYPE html>"),
        Node::Text(t) => out.push_str(&html_escape::encode_text(&**t)),
        Node::Element(e) => {
            let name = e.name();
            if REMOVED_ELEMENTS.contains(&name) {
                return;
            }
            out.push('<');
            out.push_str(name);
            for (key, value) in e.attrs() {
                let Some(value) = filter_attr(key, value) else {
                    continue;
                };
                out.push(' ');
                out.push_str(key);
                out.push_str("=\"");
                out.push_str(&html_escape::encode_double_quoted_attribute(&value));
                out.push('"');
            }
            out.push('>');
            if VOID_ELEMENTS.contains(&name) {
                return;
            }
            // The parser drops one newline right after these start tags.
            if matches!(name, "pre" | "textarea" | "listing") {
                if let Some(Node::Text(t)) = node.first_child().map(|c| c.value()) {
                    if t.starts_with('\n') {
                        out.push('\n');
                    }
                }
            }
            node.children().for_each(|c| serialize(c, out));
            out.push_str("</");
            out.push_str(name);
            out.push('>');
        }
        // Comments and processing instructions carry no content.
        Node::Comment(_) | Node::ProcessingInstruction(_) => {}
        Node::Document | Node::Fragment => node.children().for_each(|c| serialize(c, out)),
    }
}

fn filter_attr(key: &str, value: &str) -> Option<String> {
    let key = key.to_ascii_lowercase();
    if PRESENTATION_ATTRS.contains(&key.as_str()) || key.starts_with("on") {
        return None;
    }
    if key == "style" {
        let kept: Vec<String> = value
            .split(';')
            .filter_map(|decl| {
                let (prop, val) = decl.split_once(':')?;
                let prop = prop.trim().to_ascii_lowercase();
                let val = val.trim();
                (EMPHASIS_STYLE_PROPS.contains(&prop.as_str()) && !val.is_empty()).then(|| format!("{prop}: {val}"))
            })
            .collect();
        return (!kept.is_empty()).then(|| kept.join("; "));
    }
    Some(value.to_string())
}
