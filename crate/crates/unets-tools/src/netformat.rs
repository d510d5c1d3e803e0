//! Plain-text `unets` format and DOT export.
//!
//! The format is line oriented. `#` starts a comment that runs to the end
//! of the line; blank lines are ignored. The first significant line must
//! be the header `unets 1`. After it:
//!
//! * `v <id>` declares an unlabelled vertex,
//! * `v <id> <label>` declares a vertex labelled with a positive integer,
//! * `e <id1> <id2>` declares an edge (repeat for parallel edges; both
//!   endpoints equal declares a loop).
//!
//! Vertex ids are non-empty ASCII alphanumeric tokens and must be declared
//! before any edge uses them. Parsing checks the grammar only; network
//! validity is a separate concern of the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;
use unets_core::{EdgeId, GraphError, Label, MultiGraph, VertexId};

// ── Errors ───────────────────────────────────────────────────────────────

/// Positioned parse failure. Lines and columns are 1-based; columns count
/// bytes from the start of the line.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected header \"unets 1\"")]
    BadMagic { line: usize, col: usize },
    #[error("line {line}, column {col}: unknown directive \"{directive}\"")]
    UnknownDirective {
        line: usize,
        col: usize,
        directive: String,
    },
    #[error("line {line}, column {col}: undeclared endpoint \"{id}\"")]
    UndeclaredEndpoint { line: usize, col: usize, id: String },
    #[error("line {line}, column {col}: duplicate vertex \"{id}\"")]
    DuplicateVertex { line: usize, col: usize, id: String },
    #[error("line {line}, column {col}: duplicate label {label}")]
    DuplicateLabel { line: usize, col: usize, label: u32 },
    #[error("line {line}, column {col}: {message}")]
    MalformedToken {
        line: usize,
        col: usize,
        message: String,
    },
}

impl ParseError {
    /// The (line, column) the diagnostic points at.
    pub fn position(&self) -> (usize, usize) {
        match *self {
            ParseError::BadMagic { line, col }
            | ParseError::UnknownDirective { line, col, .. }
            | ParseError::UndeclaredEndpoint { line, col, .. }
            | ParseError::DuplicateVertex { line, col, .. }
            | ParseError::DuplicateLabel { line, col, .. }
            | ParseError::MalformedToken { line, col, .. } => (line, col),
        }
    }
}

// ── Tokenizer ────────────────────────────────────────────────────────────

struct Token<'a> {
    text: &'a str,
    col: usize,
}

/// Splits a comment-stripped line on spaces and tabs, keeping 1-based
/// byte columns.
fn tokens(body: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, b) in body.bytes().enumerate() {
        let ws = b == b' ' || b == b'\t' || b == b'\r';
        match (ws, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    col: s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &body[s..],
            col: s + 1,
        });
    }
    out
}

fn is_id(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(|b| b.is_ascii_alphanumeric())
}

// ── Document ─────────────────────────────────────────────────────────────

/// A checked `unets` document: the declaration lists with every reference
/// resolved, ready to build a graph or to render as text.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NetworkDocument {
    /// Format version from the header; currently always 1.
    version: u32,
    /// Declared vertices in order: (id token, optional label).
    vertices: Vec<(String, Option<Label>)>,
    /// Edges as index pairs into `vertices`, in declaration order.
    edges: Vec<(usize, usize)>,
}

impl NetworkDocument {
    /// Parses a document, reporting the first error with its position.
    pub fn parse(text: &str) -> Result<NetworkDocument, ParseError> {
        let mut saw_header = false;
        let mut vertices: Vec<(String, Option<Label>)> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels: BTreeSet<u32> = BTreeSet::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks = tokens(body);
            let Some(head) = toks.first() else {
                continue;
            };

            if !saw_header {
                let good = toks.len() == 2 && head.text == "unets" && toks[1].text == "1";
                if !good {
                    return Err(ParseError::BadMagic {
                        line,
                        col: head.col,
                    });
                }
                saw_header = true;
                continue;
            }

            match head.text {
                "v" => {
                    let id = expect_id(&toks, 1, line)?;
                    let label = match toks.len() {
                        2 => None,
                        3 => Some(expect_label(&toks[2], line)?),
                        _ => {
                            return Err(trailing(&toks[3], line));
                        }
                    };
                    if index.contains_key(id.text) {
                        return Err(ParseError::DuplicateVertex {
                            line,
                            col: id.col,
                            id: id.text.to_string(),
                        });
                    }
                    if let Some(l) = label {
                        if !labels.insert(l.0) {
                            return Err(ParseError::DuplicateLabel {
                                line,
                                col: toks[2].col,
                                label: l.0,
                            });
                        }
                    }
                    index.insert(id.text.to_string(), vertices.len());
                    vertices.push((id.text.to_string(), label));
                }
                "e" => {
                    let a = expect_id(&toks, 1, line)?;
                    let b = expect_id(&toks, 2, line)?;
                    if let Some(extra) = toks.get(3) {
                        return Err(trailing(extra, line));
                    }
                    let resolve = |t: &Token<'_>| {
                        index
                            .get(t.text)
                            .copied()
                            .ok_or_else(|| ParseError::UndeclaredEndpoint {
                                line,
                                col: t.col,
                                id: t.text.to_string(),
                            })
                    };
                    edges.push((resolve(a)?, resolve(b)?));
                }
                other => {
                    return Err(ParseError::UnknownDirective {
                        line,
                        col: head.col,
                        directive: other.to_string(),
                    });
                }
            }
        }

        if !saw_header {
            return Err(ParseError::BadMagic { line: 1, col: 1 });
        }
        Ok(NetworkDocument {
            version: 1,
            vertices,
            edges,
        })
    }

    /// The header's format version.
    pub fn version(&self) -> u32 {
        self.version
    }

    /// Builds the multigraph this document declares.
    pub fn build(&self) -> MultiGraph {
        let mut g = MultiGraph::new();
        let mut ids = Vec::with_capacity(self.vertices.len());
        for (_, label) in &self.vertices {
            let v = match label {
                Some(l) => g
                    .add_labelled_vertex(*l)
                    .expect("labels were checked during parsing"),
                None => g.add_vertex(),
            };
            ids.push(v);
        }
        for &(a, b) in &self.edges {
            g.add_edge(ids[a], ids[b])
                .expect("endpoints were checked during parsing");
        }
        g
    }

    /// Captures a graph as a document: vertices sorted by id, edges sorted
    /// by (min endpoint, max endpoint, edge id).
    pub fn from_graph(g: &MultiGraph) -> NetworkDocument {
        let mut vs: Vec<VertexId> = g.vertex_ids().collect();
        vs.sort();
        let pos: BTreeMap<VertexId, usize> =
            vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertices = vs
            .iter()
            .map(|&v| (v.0.to_string(), g.label(v).expect("vertex exists")))
            .collect();
        let mut es: Vec<(VertexId, VertexId, EdgeId)> = g
            .edge_ids()
            .map(|e| {
                let (a, b) = g.endpoints(e).expect("edge exists");
                (a.min(b), a.max(b), e)
            })
            .collect();
        es.sort();
        let edges = es.iter().map(|&(a, b, _)| (pos[&a], pos[&b])).collect();
        NetworkDocument {
            version: 1,
            vertices,
            edges,
        }
    }

    /// Renders the document: LF line endings, one space between tokens.
    pub fn render(&self) -> String {
        let mut out = String::from("unets 1\n");
        for (name, label) in &self.vertices {
            match label {
                Some(l) => writeln!(out, "v {name} {}", l.0).expect("string write"),
                None => writeln!(out, "v {name}").expect("string write"),
            }
        }
        for &(a, b) in &self.edges {
            writeln!(out, "e {} {}", self.vertices[a].0, self.vertices[b].0)
                .expect("string write");
        }
        out
    }
}

fn expect_id<'a>(
    toks: &'a [Token<'a>],
    at: usize,
    line: usize,
) -> Result<&'a Token<'a>, ParseError> {
    let Some(tok) = toks.get(at) else {
        let prev = &toks[at - 1];
        return Err(ParseError::MalformedToken {
            line,
            col: prev.col + prev.text.len() + 1,
            message: "expected a vertex id".to_string(),
        });
    };
    if !is_id(tok.text) {
        return Err(ParseError::MalformedToken {
            line,
            col: tok.col,
            message: format!("vertex id \"{}\" is not alphanumeric", tok.text),
        });
    }
    Ok(tok)
}

fn expect_label(tok: &Token<'_>, line: usize) -> Result<Label, ParseError> {
    let parsed = tok
        .text
        .bytes()
        .all(|b| b.is_ascii_digit())
        .then(|| tok.text.parse::<u32>().ok())
        .flatten();
    match parsed {
        Some(n) if n > 0 => Ok(Label(n)),
        _ => Err(ParseError::MalformedToken {
            line,
            col: tok.col,
            message: format!("label \"{}\" is not a positive integer", tok.text),
        }),
    }
}

fn trailing(tok: &Token<'_>, line: usize) -> ParseError {
    ParseError::MalformedToken {
        line,
        col: tok.col,
        message: format!("unexpected trailing token \"{}\"", tok.text),
    }
}

// ── Entry points ─────────────────────────────────────────────────────────

/// Parses `unets` text into a multigraph.
pub fn parse(text: &str) -> Result<MultiGraph, ParseError> {
    NetworkDocument::parse(text).map(|doc| doc.build())
}

/// Serializes a graph deterministically; equal graph values yield
/// byte-identical output.
pub fn serialize(g: &MultiGraph) -> String {
    NetworkDocument::from_graph(g).render()
}

/// Renders a graph as Graphviz DOT. Labelled vertices show their numbers;
/// unlabelled vertices draw as points. Edges in `highlight` carry a
/// distinct style.
pub fn to_dot(g: &MultiGraph, highlight: &[EdgeId]) -> Result<String, GraphError> {
    for &e in highlight {
        if !g.has_edge(e) {
            return Err(GraphError::UnknownEdge(e));
        }
    }
    let marked: BTreeSet<EdgeId> = highlight.iter().copied().collect();

    let mut out = String::from("graph unets {\n  node [shape=point width=0.1];\n");
    let mut vs: Vec<VertexId> = g.vertex_ids().collect();
    vs.sort();
    for v in vs {
        if let Some(l) = g.label(v).expect("vertex exists") {
            writeln!(
                out,
                "  {} [shape=circle width=0.25 label=\"{}\"];",
                v.0, l.0
            )
            .expect("string write");
        } else {
            writeln!(out, "  {};", v.0).expect("string write");
        }
    }
    let mut es: Vec<(VertexId, VertexId, EdgeId)> = g
        .edge_ids()
        .map(|e| {
            let (a, b) = g.endpoints(e).expect("edge exists");
            (a.min(b), a.max(b), e)
        })
        .collect();
    es.sort();
    for (a, b, e) in es {
        if marked.contains(&e) {
            writeln!(out, "  {} -- {} [color=crimson penwidth=2];", a.0, b.0)
                .expect("string write");
        } else {
            writeln!(out, "  {} -- {};", a.0, b.0).expect("string write");
        }
    }
    out.push_str("}\n");
    Ok(out)
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use unets_core::PhyloNetwork;

    fn code(text: &str) -> unets_core::CanonicalCode {
        parse(text).expect("parses").canonical_form()
    }

    #[test]
    fn loop_document_parses_without_validating() {
        let text = "unets 1\nv a\nv l1 1\nv l2 2\ne a l1\ne a l2\ne a a\n";
        let g = parse(text).expect("parses");
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edge_ids().filter(|&e| g.is_loop(e)).count(), 1);
        let labels: Vec<u32> = g.labelled_vertices().iter().map(|(l, _)| l.0).collect();
        assert_eq!(labels, vec![1, 2]);
        assert!(PhyloNetwork::validate(g).is_err());
    }

    #[test]
    fn quartet_file_validates_at_tier_zero() {
        let text = "unets 1\n# quartet 12|34\nv p\nv q\nv a 1\nv b 2\nv c 3\nv d 4\n\
                    e p a\ne p b\ne p q\ne q c\ne q d\n";
        let net = PhyloNetwork::validate(parse(text).expect("parses")).expect("valid");
        assert_eq!(net.leaf_count(), 4);
        assert_eq!(net.tier(), 0);
    }

    #[test]
    fn round_trip_preserves_the_code() {
        let text = "unets 1\nv a\nv l1 1\nv l2 2\ne a l1\ne a l2\ne a a\n";
        let g = parse(text).expect("parses");
        assert_eq!(code(&serialize(&g)), g.canonical_form());
    }

    #[test]
    fn serialization_is_deterministic_and_sorted() {
        let mut g = MultiGraph::new();
        let a = g.add_vertex();
        let l2 = g.add_labelled_vertex(Label(2)).expect("fresh label");
        let l1 = g.add_labelled_vertex(Label(1)).expect("fresh label");
        g.add_edge(l2, a).expect("edge");
        g.add_edge(a, l1).expect("edge");
        g.add_edge(a, l2).expect("edge");
        let text = serialize(&g);
        assert_eq!(text, "unets 1\nv 0\nv 1 2\nv 2 1\ne 0 1\ne 0 1\ne 0 2\n");
        assert_eq!(text, serialize(&g.clone()));
    }

    #[test]
    fn empty_graph_serializes_to_the_header() {
        assert_eq!(serialize(&MultiGraph::new()), "unets 1\n");
        assert_eq!(parse("unets 1\n").expect("parses").vertex_count(), 0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# leading\n\nunets 1   # trailing\n\nv a # vertex\ne a a\n";
        let g = parse(text).expect("parses");
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
    }

    #[test]
    fn diagnostics_carry_exact_positions() {
        let cases: Vec<(&str, ParseError)> = vec![
            (
                "",
                ParseError::BadMagic { line: 1, col: 1 },
            ),
            (
                "# only comments\n",
                ParseError::BadMagic { line: 1, col: 1 },
            ),
            (
                "unets 2\n",
                ParseError::BadMagic { line: 1, col: 1 },
            ),
            (
                "\n  nets 1\n",
                ParseError::BadMagic { line: 2, col: 3 },
            ),
            (
                "unets 1\nw a\n",
                ParseError::UnknownDirective {
                    line: 2,
                    col: 1,
                    directive: "w".to_string(),
                },
            ),
            (
                "unets 1\nv a\ne a b\n",
                ParseError::UndeclaredEndpoint {
                    line: 3,
                    col: 5,
                    id: "b".to_string(),
                },
            ),
            (
                "unets 1\nv a\nv a 1\n",
                ParseError::DuplicateVertex {
                    line: 3,
                    col: 3,
                    id: "a".to_string(),
                },
            ),
            (
                "unets 1\nv a 7\nv b 7\n",
                ParseError::DuplicateLabel {
                    line: 3,
                    col: 5,
                    label: 7,
                },
            ),
            (
                "unets 1\nv a 0\n",
                ParseError::MalformedToken {
                    line: 2,
                    col: 5,
                    message: "label \"0\" is not a positive integer".to_string(),
                },
            ),
            (
                "unets 1\nv a.b\n",
                ParseError::MalformedToken {
                    line: 2,
                    col: 3,
                    message: "vertex id \"a.b\" is not alphanumeric".to_string(),
                },
            ),
            (
                "unets 1\nv\n",
                ParseError::MalformedToken {
                    line: 2,
                    col: 3,
                    message: "expected a vertex id".to_string(),
                },
            ),
            (
                "unets 1\nv a\ne a a a\n",
                ParseError::MalformedToken {
                    line: 3,
                    col: 7,
                    message: "unexpected trailing token \"a\"".to_string(),
                },
            ),
        ];
        for (text, want) in cases {
            assert_eq!(parse(text).expect_err("rejects"), want, "input {text:?}");
        }
    }

    #[test]
    fn edges_require_prior_declaration() {
        let text = "unets 1\ne a b\nv a\nv b\n";
        let err = parse(text).expect_err("rejects");
        assert_eq!(err.position(), (2, 3));
        assert!(matches!(err, ParseError::UndeclaredEndpoint { .. }));
    }

    #[test]
    fn dot_export_is_deterministic_and_highlights() {
        let text = "unets 1\nv a\nv b 1\ne a b\ne a a\n";
        let g = parse(text).expect("parses");
        let plain = to_dot(&g, &[]).expect("renders");
        assert!(plain.starts_with("graph unets {"));
        assert!(plain.contains("label=\"1\""));
        assert!(plain.contains("0 -- 0;"));
        assert!(!plain.contains("crimson"));

        let e = g.edge_ids().next().expect("edge");
        let marked = to_dot(&g, &[e]).expect("renders");
        assert!(marked.contains("crimson"));

        let missing = EdgeId(999);
        assert_eq!(
            to_dot(&g, &[missing]).expect_err("rejects"),
            GraphError::UnknownEdge(missing)
        );
    }

    /// Random syntactically valid documents built from a seed: a vertex
    /// pool with scattered labels, then arbitrary edges over it.
    fn document_strategy() -> impl Strategy<Value = String> {
        (1usize..12, proptest::collection::vec(0usize..12, 0..20), 0u32..4).prop_map(
            |(nv, raw_edges, label_stride)| {
                let mut text = String::from("unets 1\n");
                for i in 0..nv {
                    if label_stride > 0 && i % (label_stride as usize + 1) == 0 {
                        text.push_str(&format!("v n{i} {}\n", i + 1));
                    } else {
                        text.push_str(&format!("v n{i}\n"));
                    }
                }
                for pair in raw_edges.chunks(2) {
                    if let [a, b] = *pair {
                        text.push_str(&format!("e n{} n{}\n", a % nv, b % nv));
                    }
                }
                text
            },
        )
    }

    proptest! {
        #[test]
        fn fuzzed_input_parses_or_diagnoses(text in "\\PC*") {
            let _ = parse(&text);
        }

        #[test]
        fn fuzzed_lines_parse_or_diagnose(
            lines in proptest::collection::vec("[ve#a-z0-9 .]{0,12}", 0..8)
        ) {
            let text = format!("unets 1\n{}", lines.join("\n"));
            let _ = parse(&text);
        }

        #[test]
        fn generated_documents_round_trip(text in document_strategy()) {
            let g = parse(&text).expect("generated documents are well formed");
            let out = serialize(&g);
            prop_assert_eq!(code(&out), g.canonical_form());
            prop_assert_eq!(serialize(&parse(&out).expect("round trip parses")), out);
        }
    }
}
