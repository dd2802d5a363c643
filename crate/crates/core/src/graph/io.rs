//! Plain-text graph and label files, and DOT export.
//!
//! Graph files start with a header line `n m` followed by `m` edge lines
//! `u v`. Lines starting with `#` are comments. A line holding a single ID
//! declares an isolated vertex; without such lines, isolated vertices are
//! filled in with the smallest unused non-negative IDs until there are `n`.
//! [`write_graph`] only emits declaration lines when the IDs are not exactly
//! `0..n`, so graphs from the built-in generators round-trip as pure edge lists.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Graph, GraphError, LabelAssignment, VertexId};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_u64(line: usize, tok: &str) -> Result<u64, GraphError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got {tok:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header line"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [n, m] = toks[..] else {
        return Err(parse_err(hline, "header must be \"n m\""));
    };
    let (n, m) = (parse_u64(hline, n)? as usize, parse_u64(hline, m)? as usize);

    let mut declared = Vec::new();
    let mut edges = Vec::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[..] {
            [v] => declared.push(VertexId(parse_u64(line, v)?)),
            [u, v] => {
                let e = (VertexId(parse_u64(line, u)?), VertexId(parse_u64(line, v)?));
                if e.0 == e.1 {
                    return Err(parse_err(line, format!("self-loop at {}", e.0)));
                }
                edges.push(e);
            }
            _ => return Err(parse_err(line, "expected \"u v\" or a single vertex ID")),
        }
    }
    if edges.len() != m {
        return Err(parse_err(hline, format!("header declares {m} edges, found {}", edges.len())));
    }
    let mut ids: BTreeSet<VertexId> = declared.iter().copied().collect();
    if ids.len() != declared.len() {
        return Err(parse_err(hline, "a vertex is declared twice"));
    }
    ids.extend(edges.iter().flat_map(|&(u, v)| [u, v]));
    if ids.len() > n {
        return Err(parse_err(hline, format!("header declares {n} vertices, found {}", ids.len())));
    }
    let mut next = 0u64;
    while ids.len() < n {
        ids.insert(VertexId(next));
        next += 1;
    }
    Graph::new(ids, edges)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let text = fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
    parse_graph(&text)
}

fn push_comment(out: &mut String, comment: Option<&str>) {
    for line in comment.into_iter().flat_map(str::lines) {
        let _ = writeln!(out, "# {line}");
    }
}

/// Canonical text form: header, optional comment, declarations, sorted edges.
pub fn write_graph(g: &Graph, comment: Option<&str>) -> String {
    let mut out = String::new();
    push_comment(&mut out, comment);
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    let dense = g.vertices().iter().enumerate().all(|(i, v)| v.0 == i as u64);
    if !dense {
        for &v in g.vertices() {
            if g.degree(v).unwrap_or(0) == 0 {
                let _ = writeln!(out, "{v}");
            }
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Label files hold one `vertex label` pair per line.
pub fn parse_labels(text: &str) -> Result<LabelAssignment, GraphError> {
    let mut labels = std::collections::BTreeMap::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [v, label] = toks[..] else {
            return Err(parse_err(line, "expected \"vertex label\""));
        };
        let v = VertexId(parse_u64(line, v)?);
        if labels.insert(v, parse_u64(line, label)?).is_some() {
            return Err(parse_err(line, format!("vertex {v} labeled twice")));
        }
    }
    LabelAssignment::new(labels)
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelAssignment, GraphError> {
    let text = fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
    parse_labels(&text)
}

pub fn write_labels(f: &LabelAssignment, comment: Option<&str>) -> String {
    let mut out = String::new();
    push_comment(&mut out, comment);
    for (v, l) in f.iter() {
        let _ = writeln!(out, "{v} {l}");
    }
    out
}

/// One `graph` block; each vertex carries `label` and the index of its
/// cluster in [`Graph::extract_clusters`] order.
pub fn to_dot(g: &Graph, f: &LabelAssignment, comment: Option<&str>) -> Result<String, GraphError> {
    let clusters = g.extract_clusters(f)?;
    let mut cluster_of = std::collections::BTreeMap::new();
    for (i, cl) in clusters.iter().enumerate() {
        for &v in &cl.members {
            cluster_of.insert(v, i);
        }
    }
    let mut out = String::new();
    for line in comment.into_iter().flat_map(str::lines) {
        let _ = writeln!(out, "// {line}");
    }
    out.push_str("graph G {\n");
    for &v in g.vertices() {
        let label = f.get(v).unwrap_or_default();
        let _ = writeln!(out, "  {v} [label={label}, cluster={}];", cluster_of[&v]);
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_gnp, path_graph};
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments_and_isolated_padding() {
        let g = parse_graph("# a comment\n4 2\n0 1\n# mid\n1 2\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.degree(VertexId(3)).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_graph(""), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph("2 1\n0 0\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph("2 1\n0 7\n1 2\n"), Err(GraphError::Parse { .. })));
        assert_eq!(
            parse_graph("3 2\n0 1\n1 0\n"),
            Err(GraphError::ParallelEdge(VertexId(0), VertexId(1)))
        );
    }

    #[test]
    fn sparse_ids_round_trip() {
        let g = Graph::new([VertexId(3), VertexId(100)], [(VertexId(7), VertexId(42))]).unwrap();
        let text = write_graph(&g, Some("sparse"));
        assert_eq!(text, "# sparse\n4 1\n3\n100\n7 42\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn labels_round_trip() {
        let f: LabelAssignment = [(VertexId(0), 3), (VertexId(5), 1)].into_iter().collect();
        assert_eq!(parse_labels(&write_labels(&f, Some("x"))).unwrap(), f);
        assert!(parse_labels("0 1\n0 2\n").is_err());
        assert_eq!(parse_labels("4 0\n"), Err(GraphError::ZeroLabel(VertexId(4))));
    }

    #[test]
    fn dot_export_shape() {
        let g = path_graph(3);
        let f: LabelAssignment = [(VertexId(0), 1), (VertexId(1), 1), (VertexId(2), 2)]
            .into_iter()
            .collect();
        let dot = to_dot(&g, &f, None).unwrap();
        assert_eq!(
            dot,
            "graph G {\n  0 [label=1, cluster=0];\n  1 [label=1, cluster=0];\n  2 [label=2, cluster=1];\n  0 -- 1;\n  1 -- 2;\n}\n"
        );
    }

    proptest! {
        #[test]
        fn save_load_is_bit_exact(n in 1usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = generate_gnp(n, p, seed);
            let text = write_graph(&g, None);
            let back = parse_graph(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(write_graph(&back, None), text);
        }
    }
}
