//! Graphs with human-readable node labels, and the two on-disk formats.
//!
//! The edge-list format has one `u v` pair per line; `#` starts a comment.
//! Tokens are node labels, double-quoted when they contain whitespace, `#` or
//! quotes (with `\"` and `\\` escapes). When every label is an integer, dense ids follow
//! numeric order, otherwise order of first appearance. Both readers drop
//! self-loops, collapse parallel links and keep the largest connected
//! component.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use tree_route_core::graph::largest_component;
use tree_route_core::{Edge, Graph, NodeId};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub graph: Graph,
    labels: Vec<String>,
    pub name: Option<String>,
}

impl Topology {
    /// Labels each node with its integer id.
    pub fn unlabeled(graph: Graph) -> Self {
        let labels = graph.nodes().map(|v| v.to_string()).collect();
        Topology { graph, labels, name: None }
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks a node up by label, falling back to its integer id.
    pub fn resolve(&self, name: &str) -> Result<NodeId> {
        if let Some(i) = self.labels.iter().position(|l| l == name) {
            return Ok(NodeId::new(i));
        }
        match name.parse::<usize>() {
            Ok(i) if i < self.graph.node_count() => Ok(NodeId::new(i)),
            _ => Err(Error::UnknownNode(name.to_owned())),
        }
    }

    /// Parses `u-v`. Labels may themselves contain dashes, so every split
    /// point is tried.
    pub fn resolve_edge(&self, text: &str) -> Result<Edge> {
        let text = text.trim();
        for (i, _) in text.match_indices('-') {
            let (a, b) = (&text[..i], &text[i + 1..]);
            if let (Ok(u), Ok(v)) = (self.resolve(a.trim()), self.resolve(b.trim())) {
                if u != v && self.graph.has_edge(u, v) {
                    return Ok(Edge::new(u, v));
                }
            }
        }
        Err(Error::UnknownNode(text.to_owned()))
    }

    pub fn edge_label(&self, e: Edge) -> String {
        let (a, b) = e.endpoints();
        format!("{}-{}", self.label(a), self.label(b))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_xml = matches!(
            path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
            Some("graphml" | "xml")
        );
        if is_xml {
            parse_graphml(&text)
        } else {
            parse_edge_list(&text)
        }
    }
}

/// Builds a connected topology from raw labeled links.
fn reduce(labels: Vec<String>, links: &[(usize, usize)], name: Option<String>) -> Result<Topology> {
    let (graph, kept) = largest_component(labels.len(), links)?;
    if graph.edge_count() == 0 {
        return Err(Error::Graph(tree_route_core::Error::EmptyGraph));
    }
    let labels = kept.into_iter().map(|i| labels[i].clone()).collect();
    Ok(Topology { graph, labels, name })
}

pub fn parse_edge_list(text: &str) -> Result<Topology> {
    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields = tokenize(line).map_err(|message| Error::Parse { line: lineno + 1, message })?;
        if fields.is_empty() {
            continue;
        }
        let [a, b] = &fields[..] else {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected `u v`, found {} fields", fields.len()),
            });
        };
        let mut id = |t: &str| {
            *index.entry(t.to_owned()).or_insert_with(|| {
                tokens.push(t.to_owned());
                tokens.len() - 1
            })
        };
        raw.push((id(a), id(b)));
    }
    if tokens.is_empty() {
        return Err(Error::Graph(tree_route_core::Error::EmptyGraph));
    }
    let numeric: Option<Vec<u64>> = tokens.iter().map(|t| t.parse().ok()).collect();
    let mut order: Vec<usize> = (0..tokens.len()).collect();
    if let Some(values) = numeric {
        order.sort_by_key(|&i| values[i]);
    }
    let mut rank = vec![0; tokens.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let labels = order.iter().map(|&i| tokens[i].clone()).collect();
    let links: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (rank[a], rank[b])).collect();
    reduce(labels, &links, None)
}

/// Splits one edge-list line into tokens, dropping any comment.
fn tokenize(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut token = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e @ ('"' | '\\')) => token.push(e),
                        _ => return Err("bad escape in quoted label".into()),
                    },
                    Some(c) => token.push(c),
                    None => return Err("unterminated quoted label".into()),
                }
            }
            out.push(token);
        } else {
            let mut token = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '#' {
                    break;
                }
                if c == '"' {
                    return Err("quote inside unquoted label".into());
                }
                token.push(c);
                chars.next();
            }
            out.push(token);
        }
    }
    Ok(out)
}

fn quote(label: &str) -> String {
    if !label.is_empty() && !label.contains(|c: char| c.is_whitespace() || c == '#' || c == '"') {
        return label.to_owned();
    }
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_edge_list(t: &Topology) -> String {
    let mut out = String::new();
    if let Some(name) = &t.name {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, "# {} nodes, {} links", t.graph.node_count(), t.graph.edge_count());
    for &e in t.graph.edges() {
        let (a, b) = e.endpoints();
        let _ = writeln!(out, "{} {}", quote(t.label(a)), quote(t.label(b)));
    }
    out
}

fn graphml_error(doc_text: &str, pos: usize, message: impl Into<String>) -> Error {
    let before = &doc_text[..pos.min(doc_text.len())];
    let line = before.matches('\n').count() as u32 + 1;
    let column = (before.len() - before.rfind('\n').map_or(0, |i| i + 1)) as u32 + 1;
    Error::GraphMl { line, column, message: message.into() }
}

/// Reads GraphML as written by the Internet Topology Zoo.
pub fn parse_graphml(text: &str) -> Result<Topology> {
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::GraphMl { line: pos.row, column: pos.col, message: e.to_string() }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "graphml" {
        return Err(graphml_error(text, root.range().start, "root element is not <graphml>"));
    }
    let mut label_key = None;
    let mut name_key = None;
    for key in root.children().filter(|n| n.has_tag_name("key")) {
        let id = key.attribute("id");
        match (key.attribute("for"), key.attribute("attr.name")) {
            (Some("node"), Some("label")) => label_key = id,
            (Some("graph"), Some("Network" | "label")) => name_key = id,
            _ => {}
        }
    }
    let graph = root
        .children()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| graphml_error(text, root.range().start, "missing <graph> element"))?;
    let data = |n: roxmltree::Node, key: Option<&str>| {
        let key = key?;
        n.children()
            .find(|c| c.has_tag_name("data") && c.attribute("key") == Some(key))
            .and_then(|c| c.text())
            .map(|s| s.trim().to_owned())
    };
    let name = data(graph, name_key);

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::new();
    for node in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| graphml_error(text, node.range().start, "<node> without id"))?;
        if index.insert(id, labels.len()).is_some() {
            return Err(graphml_error(text, node.range().start, format!("duplicate node id `{id}`")));
        }
        labels.push(data(node, label_key).filter(|l| !l.is_empty()).unwrap_or_else(|| id.to_owned()));
    }
    // Topology Zoo labels are not always unique; disambiguate with the id.
    let mut seen: HashMap<String, usize> = HashMap::new();
    for l in &labels {
        *seen.entry(l.clone()).or_default() += 1;
    }
    for (id, &i) in &index {
        if seen[&labels[i]] > 1 {
            labels[i] = format!("{} ({id})", labels[i]);
        }
    }

    let mut links = Vec::new();
    for edge in graph.children().filter(|n| n.has_tag_name("edge")) {
        let end = |attr: &str| {
            let v = edge
                .attribute(attr)
                .ok_or_else(|| graphml_error(text, edge.range().start, format!("<edge> without {attr}")))?;
            index
                .get(v)
                .copied()
                .ok_or_else(|| graphml_error(text, edge.range().start, format!("edge references unknown node `{v}`")))
        };
        links.push((end("source")?, end("target")?));
    }
    reduce(labels, &links, name)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn write_graphml(t: &Topology) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key attr.name=\"label\" attr.type=\"string\" for=\"node\" id=\"label\" />\n");
    out.push_str("  <key attr.name=\"Network\" attr.type=\"string\" for=\"graph\" id=\"network\" />\n");
    out.push_str("  <graph edgedefault=\"undirected\">\n");
    if let Some(name) = &t.name {
        let _ = writeln!(out, "    <data key=\"network\">{}</data>", escape(name));
    }
    for v in t.graph.nodes() {
        let _ = writeln!(
            out,
            "    <node id=\"{v}\">\n      <data key=\"label\">{}</data>\n    </node>",
            escape(t.label(v))
        );
    }
    for &e in t.graph.edges() {
        let (a, b) = e.endpoints();
        let _ = writeln!(out, "    <edge source=\"{a}\" target=\"{b}\" />");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
