use ego_tree::NodeRef;
use scraper::node::Element;
use scraper::{Html, Node};
use serde::{Deserialize, Serialize};

use super::{Emphasis, EmphasisSet, IngestError, RawDocument, REMOVED_ELEMENTS};
use crate::text::normalize_whitespace;

/// Phrasing elements. A run of these (plus text) is flattened into one leaf
/// so that inline markup does not cut sentences apart.
const INLINE_ELEMENTS: &[&str] = &[
    "a", "abbr", "acronym", "b", "bdi", "bdo", "big", "br", "cite", "code", "data", "del", "dfn", "em", "font", "i",
    "img", "ins", "kbd", "label", "mark", "q", "s", "samp", "small", "span", "strike", "strong", "sub", "sup", "time",
    "tt", "u", "var", "wbr",
];

/// Tag of the synthetic leaf that wraps loose text inside a container.
pub const TEXT_RUN_TAG: &str = "#text";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomNode {
    pub tag: String,
    pub children: Vec<DomNode>,
    /// Whitespace-normalized text; only set on leaves.
    pub text: String,
    pub sibling_index: u32,
    pub emphasis: EmphasisSet,
}

impl DomNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn leaf(tag: &str, text: String, emphasis: EmphasisSet) -> Self {
        Self {
            tag: tag.to_string(),
            children: Vec::new(),
            text,
            sibling_index: 0,
            emphasis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathStep {
    pub tag: String,
    pub sibling_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomTree {
    pub doc_id: String,
    /// Text of the `<title>` element, if any.
    pub title: Option<String>,
    /// The `<body>` element; always a container.
    pub root: DomNode,
}

impl DomTree {
    /// Follows a root-first path of (tag, sibling index) steps.
    pub fn resolve(&self, path: &[PathStep]) -> Option<&DomNode> {
        let (first, rest) = path.split_first()?;
        if first.tag != self.root.tag || first.sibling_index != 0 {
            return None;
        }
        rest.iter().try_fold(&self.root, |node, step| {
            node.children
                .get(step.sibling_index as usize)
                .filter(|c| c.tag == step.tag)
        })
    }

    /// Text leaves in document order.
    pub fn leaves(&self) -> Vec<&DomNode> {
        fn walk<'a>(n: &'a DomNode, out: &mut Vec<&'a DomNode>) {
            if n.is_leaf() {
                if !n.text.is_empty() {
                    out.push(n);
                }
            } else {
                n.children.iter().for_each(|c| walk(c, out));
            }
        }
        let mut out = Vec::new();
        self.root.children.iter().for_each(|c| walk(c, &mut out));
        out
    }
}

/// A non-empty text leaf together with its position under its parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicroBlock {
    /// Document-order index.
    pub id: u32,
    pub doc_id: String,
    pub parent_path: Vec<PathStep>,
    pub text: String,
    pub sibling_index: u32,
    pub sibling_count: u32,
    pub emphasis: EmphasisSet,
}

pub fn build_dom(doc: &RawDocument) -> Result<DomTree, IngestError> {
    let html = Html::parse_document(doc.html()?);
    let root = html.tree.root();
    let body = find_element(root, "body").ok_or_else(|| IngestError::Parse {
        doc_id: doc.doc_id.clone(),
        message: "no body element".into(),
    })?;
    let title = find_element(root, "title")
        .map(|t| {
            normalize_whitespace(
                &t.children()
                    .filter_map(|c| c.value().as_text().map(|t| t.to_string()))
                    .collect::<String>(),
            )
        })
        .filter(|t| !t.is_empty());

    let body_el = body.value().as_element().expect("body is an element");
    let own = tag_flags(body_el);
    Ok(DomTree {
        doc_id: doc.doc_id.clone(),
        title,
        root: DomNode {
            tag: "body".into(),
            children: build_children(body, &own),
            text: String::new(),
            sibling_index: 0,
            emphasis: own,
        },
    })
}

/// One micro block per non-empty text leaf, in document order.
pub fn extract_micro_blocks(tree: &DomTree) -> Vec<MicroBlock> {
    fn walk(node: &DomNode, path: &mut Vec<PathStep>, tree: &DomTree, out: &mut Vec<MicroBlock>) {
        path.push(PathStep {
            tag: node.tag.clone(),
            sibling_index: node.sibling_index,
        });
        let count = node.children.len() as u32;
        for child in &node.children {
            if child.is_leaf() {
                if !child.text.is_empty() {
                    out.push(MicroBlock {
                        id: out.len() as u32,
                        doc_id: tree.doc_id.clone(),
                        parent_path: path.clone(),
                        text: child.text.clone(),
                        sibling_index: child.sibling_index,
                        sibling_count: count,
                        emphasis: child.emphasis.clone(),
                    });
                }
            } else {
                walk(child, path, tree, out);
            }
        }
        path.pop();
    }
    let mut out = Vec::new();
    walk(&tree.root, &mut Vec::new(), tree, &mut out);
    out
}

fn find_element<'a>(node: NodeRef<'a, Node>, name: &str) -> Option<NodeRef<'a, Node>> {
    node.descendants()
        .find(|n| n.value().as_element().is_some_and(|e| e.name() == name))
}

fn tag_flags(el: &Element) -> EmphasisSet {
    let mut flags = EmphasisSet::new();
    match el.name() {
        "b" | "strong" => {
            flags.insert(Emphasis::Bold);
        }
        "u" => {
            flags.insert(Emphasis::Underline);
        }
        "i" | "em" => {
            flags.insert(Emphasis::Italics);
        }
        "caption" => {
            flags.insert(Emphasis::Caption);
        }
        "h1" | "h2" | "h3" | "h4" | "h5" | "h6" | "title" => {
            flags.insert(Emphasis::ParagraphTitle);
        }
        _ => {}
    }
    if el.attr("color").is_some_and(|c| !c.trim().is_empty()) {
        flags.insert(Emphasis::ColorChange);
    }
    if let Some(style) = el.attr("style") {
        for decl in style.split(';') {
            let Some((prop, val)) = decl.split_once(':') else {
                continue;
            };
            let val = val.trim().to_ascii_lowercase();
            match prop.trim().to_ascii_lowercase().as_str() {
                "color" if !val.is_empty() => {
                    flags.insert(Emphasis::ColorChange);
                }
                "font-weight" if val == "bold" || val == "bolder" || val.parse::<u32>().is_ok_and(|w| w >= 600) => {
                    flags.insert(Emphasis::Bold);
                }
                "font-style" if val == "italic" || val == "oblique" => {
                    flags.insert(Emphasis::Italics);
                }
                "text-decoration" if val.contains("underline") => {
                    flags.insert(Emphasis::Underline);
                }
                _ => {}
            }
        }
    }
    flags
}

fn is_removed(node: NodeRef<'_, Node>) -> bool {
    node.value()
        .as_element()
        .is_some_and(|e| REMOVED_ELEMENTS.contains(&e.name()))
}

/// Text, comments and inline elements whose whole subtree is inline.
fn is_inline(node: NodeRef<'_, Node>) -> bool {
    match node.value() {
        Node::Text(_) | Node::Comment(_) | Node::ProcessingInstruction(_) => true,
        Node::Element(e) => {
            REMOVED_ELEMENTS.contains(&e.name())
                || (INLINE_ELEMENTS.contains(&e.name()) && node.children().all(is_inline))
        }
        _ => false,
    }
}

fn is_insignificant(node: NodeRef<'_, Node>) -> bool {
    match node.value() {
        Node::Text(t) => t.trim().is_empty(),
        Node::Element(_) => is_removed(node),
        _ => true,
    }
}

fn build_element(node: NodeRef<'_, Node>, inherited: &EmphasisSet) -> Option<DomNode> {
    let el = node.value().as_element()?;
    if REMOVED_ELEMENTS.contains(&el.name()) {
        return None;
    }
    let own: EmphasisSet = inherited.union(&tag_flags(el)).copied().collect();
    if node.children().all(is_inline) {
        return text_leaf(el.name(), node.children(), &own);
    }
    let children = build_children(node, &own);
    (!children.is_empty()).then(|| DomNode {
        tag: el.name().to_string(),
        children,
        text: String::new(),
        sibling_index: 0,
        emphasis: own,
    })
}

/// Builds a container's children. Consecutive inline content becomes one
/// leaf; a lone inline element keeps its own tag.
fn build_children(node: NodeRef<'_, Node>, own: &EmphasisSet) -> Vec<DomNode> {
    let mut children = Vec::new();
    let mut run: Vec<NodeRef<'_, Node>> = Vec::new();
    let flush = |run: &mut Vec<NodeRef<'_, Node>>, children: &mut Vec<DomNode>| {
        let significant: Vec<_> = run.iter().copied().filter(|n| !is_insignificant(*n)).collect();
        let built = match significant.as_slice() {
            [] => None,
            [single] if single.value().is_element() => build_element(*single, own),
            _ => text_leaf(TEXT_RUN_TAG, run.iter().copied(), own),
        };
        children.extend(built);
        run.clear();
    };
    for child in node.children() {
        if is_inline(child) {
            run.push(child);
        } else {
            flush(&mut run, &mut children);
            children.extend(build_element(child, own));
        }
    }
    flush(&mut run, &mut children);
    for (i, c) in children.iter_mut().enumerate() {
        c.sibling_index = i as u32;
    }
    children
}

/// Leaf emphasis is the set of flags shared by every non-blank text run.
fn text_leaf<'a>(tag: &str, nodes: impl Iterator<Item = NodeRef<'a, Node>>, own: &EmphasisSet) -> Option<DomNode> {
    fn collect(node: NodeRef<'_, Node>, flags: &EmphasisSet, text: &mut String, common: &mut Option<EmphasisSet>) {
        match node.value() {
            Node::Text(t) => {
                text.push_str(t);
                if !t.trim().is_empty() {
                    *common = Some(match common.take() {
                        None => flags.clone(),
                        Some(c) => c.intersection(flags).copied().collect(),
                    });
                }
            }
            Node::Element(e) if REMOVED_ELEMENTS.contains(&e.name()) => {}
            Node::Element(e) => {
                if e.name() == "br" {
                    text.push(' ');
                }
                let flags: EmphasisSet = flags.union(&tag_flags(e)).copied().collect();
                node.children().for_each(|c| collect(c, &flags, text, common));
            }
            _ => {}
        }
    }
    let mut text = String::new();
    let mut common = None;
    for n in nodes {
        collect(n, own, &mut text, &mut common);
    }
    let text = normalize_whitespace(&text);
    (!text.is_empty()).then(|| DomNode::leaf(tag, text, common.unwrap_or_else(|| own.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(html: &str) -> DomTree {
        build_dom(&RawDocument::from_html("d", "mem", html)).unwrap()
    }

    fn set(flags: &[Emphasis]) -> EmphasisSet {
        flags.iter().copied().collect()
    }

    #[test]
    fn two_paragraphs_under_body() {
        let t = tree("<body><p>A</p><p>B</p></body>");
        assert_eq!(t.root.children.len(), 2);
        assert!(t.root.children.iter().all(DomNode::is_leaf));
        assert_eq!(t.root.children[0].sibling_index, 0);
        assert_eq!(t.root.children[1].sibling_index, 1);
        assert_eq!(t.root.children[1].text, "B");
    }

    #[test]
    fn bold_leaf() {
        let t = tree("<p><b>X</b></p>");
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].text, "X");
        assert_eq!(leaves[0].emphasis, set(&[Emphasis::Bold]));
    }

    #[test]
    fn partial_inline_emphasis_does_not_mark_leaf() {
        let t = tree("<p>The <b>placement</b> cell</p>");
        let leaves = t.leaves();
        assert_eq!(leaves[0].text, "The placement cell");
        assert!(leaves[0].emphasis.is_empty());
    }

    #[test]
    fn emphasis_from_headings_caption_and_style() {
        let t = tree(
            r#"<h2>IT</h2><table><caption>Cap</caption><tr><td>c</td></tr></table>
               <p style="color: red">Red</p><font color="blue">Blue</font><p><u><i>UI</i></u></p>"#,
        );
        let leaves = t.leaves();
        let by_text = |s: &str| leaves.iter().find(|l| l.text == s).unwrap().emphasis.clone();
        assert_eq!(by_text("IT"), set(&[Emphasis::ParagraphTitle]));
        assert_eq!(by_text("Cap"), set(&[Emphasis::Caption]));
        assert_eq!(by_text("c"), set(&[]));
        assert_eq!(by_text("Red"), set(&[Emphasis::ColorChange]));
        assert_eq!(by_text("Blue"), set(&[Emphasis::ColorChange]));
        assert_eq!(by_text("UI"), set(&[Emphasis::Underline, Emphasis::Italics]));
    }

    #[test]
    fn empty_divs_yield_no_leaves() {
        let t = tree("<div><div></div></div>");
        assert!(t.root.children.is_empty());
        assert!(extract_micro_blocks(&t).is_empty());
    }

    #[test]
    fn nodes_have_children_xor_text() {
        let t = tree("<div>intro <b>bold</b><p>para</p>tail<span>s</span></div><p>x<br>y</p>");
        fn check(n: &DomNode) {
            assert!(n.children.is_empty() || n.text.is_empty(), "{n:?}");
            for (i, c) in n.children.iter().enumerate() {
                assert_eq!(c.sibling_index, i as u32);
                check(c);
            }
        }
        check(&t.root);
        let texts: Vec<_> = t.leaves().iter().map(|l| l.text.clone()).collect();
        assert_eq!(texts, ["intro bold", "para", "tails", "x y"]);
        assert_eq!(t.root.children[0].children[0].tag, TEXT_RUN_TAG);
    }

    #[test]
    fn body_text_is_wrapped() {
        let t = tree("<body>just text</body>");
        let mbs = extract_micro_blocks(&t);
        assert_eq!(mbs.len(), 1);
        assert_eq!(mbs[0].parent_path.len(), 1);
    }

    #[test]
    fn micro_blocks_record_siblings() {
        let t = tree("<div><p>A</p><p>B</p></div>");
        let mbs = extract_micro_blocks(&t);
        assert_eq!(mbs.len(), 2);
        assert!(mbs.iter().all(|m| m.sibling_count == 2));
        assert_eq!(mbs[1].sibling_index, 1);
        assert_eq!(mbs[0].parent_path, mbs[1].parent_path);
    }

    #[test]
    fn whitespace_leaf_excluded() {
        let t = tree("<div><p>A</p><p>   \n </p></div>");
        assert_eq!(extract_micro_blocks(&t).len(), 1);
    }

    #[test]
    fn figure_one_shape() {
        let html = "<body><div><p>c1</p><p>c2</p><p>c3</p><p>c4</p></div><section><p>c5</p><p>c6</p></section></body>";
        let t = tree(html);
        let mbs = extract_micro_blocks(&t);
        assert_eq!(mbs.len(), 6);
        assert!(mbs[..4].iter().all(|m| m.parent_path == mbs[0].parent_path));
        assert!(mbs[4..].iter().all(|m| m.parent_path == mbs[4].parent_path));
        assert_ne!(mbs[0].parent_path, mbs[4].parent_path);
        for m in &mbs {
            assert!(t.resolve(&m.parent_path).is_some());
        }
    }

    #[test]
    fn title_is_captured() {
        let t = tree("<html><head><title> A  College </title></head><body><p>x</p></body></html>");
        assert_eq!(t.title.as_deref(), Some("A College"));
    }
}
