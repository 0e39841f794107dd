use std::cmp::Reverse;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{cache, GraphBuilder, InfluenceGraph, ProbabilitySource};
use crate::error::{Error, Result};

/// On-disk graph encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphFormat {
    /// Binary cache when the file starts with the cache magic, text otherwise.
    #[default]
    Auto,
    EdgeList,
    Binary,
}

/// Parses a whitespace-separated edge list.
///
/// Lines hold `u v` or `u v p`; blank lines and lines starting with `#` or
/// `%` are skipped. A file must use one form throughout. Without the
/// probability column every edge gets the placeholder 1.0.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<InfluenceGraph> {
    let mut builder = GraphBuilder::new();
    let mut weighted: Option<bool> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(format!(
                "expected 2 or 3 fields, found {}",
                fields.len()
            )));
        }
        let has_p = fields.len() == 3;
        match weighted {
            None => weighted = Some(has_p),
            Some(w) if w != has_p => {
                return Err(parse_err(
                    "mixed weighted and unweighted lines".to_string(),
                ))
            }
            _ => {}
        }
        let u: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("invalid vertex label {:?}", fields[0])))?;
        let v: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("invalid vertex label {:?}", fields[1])))?;
        let p: f64 = if has_p {
            fields[2]
                .parse()
                .map_err(|_| parse_err(format!("invalid probability {:?}", fields[2])))?
        } else {
            1.0
        };
        if u == v {
            return Err(Error::domain(format!("line {line_no}: self-loop on vertex {u}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!(
                "line {line_no}: probability {p} outside (0, 1]"
            )));
        }
        builder.add_edge(u, v, p);
    }

    let source = match weighted {
        Some(false) => ProbabilitySource::Unassigned,
        _ => ProbabilitySource::Explicit,
    };
    builder.build(source)
}

/// Reads a graph file in the given format.
pub fn read_graph(path: &Path, format: GraphFormat) -> Result<InfluenceGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let format = match format {
        GraphFormat::Auto => {
            let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
            if head.starts_with(&cache::BINARY_MAGIC) {
                GraphFormat::Binary
            } else {
                GraphFormat::EdgeList
            }
        }
        f => f,
    };
    match format {
        GraphFormat::Binary => {
            let mut bytes = Vec::new();
            reader
                .read_to_end(&mut bytes)
                .map_err(|e| Error::io(path, e))?;
            cache::read_binary(&bytes)
        }
        _ => load_edge_list(reader),
    }
}

/// Writes the graph as an edge list with external labels.
///
/// Edges are emitted in an order under which re-loading assigns every vertex
/// the same dense id, so `load_edge_list(write_edge_list(g)) == g` for any
/// graph that was itself loaded from an edge list.
pub fn write_edge_list<W: Write>(graph: &InfluenceGraph, mut out: W) -> std::io::Result<()> {
    let mut order: Vec<(u32, u32, f64)> = graph.edges().collect();
    // A vertex x first appears in an edge whose larger endpoint is at most
    // x + 1; when it is x + 1 the edge is (x, x + 1) with x as source.
    order.sort_by_key(|&(u, v, _)| (u.max(v), Reverse(u.min(v)), u != u.min(v)));
    let weighted = graph.probability_source() != ProbabilitySource::Unassigned;
    for (u, v, p) in order {
        if weighted {
            writeln!(out, "{} {} {}", graph.label(u), graph.label(v), p)?;
        } else {
            writeln!(out, "{} {}", graph.label(u), graph.label(v))?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn load(s: &str) -> Result<InfluenceGraph> {
        load_edge_list(s.as_bytes())
    }

    #[test]
    fn loads_weighted_chain() {
        let g = load("0 1 0.5\n1 2 0.4").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.probability(0, 1), Some(0.5));
        assert_eq!(g.probability(1, 2), Some(0.4));
    }

    #[test]
    fn empty_stream_is_empty_graph() {
        let g = load("").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
        let g = load("# only a comment\n% another\n\n").unwrap();
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn self_loop_is_domain_error() {
        assert!(matches!(load("0 0 0.5"), Err(Error::Domain(_))));
    }

    #[test]
    fn unweighted_uses_placeholder() {
        let g = load("5 6\n6 7\n").unwrap();
        assert!(g.edges().all(|(_, _, p)| p == 1.0));
        assert_eq!(g.probability_source(), ProbabilitySource::Unassigned);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match load("0 1 0.5\n# c\n1 x 0.5") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match load("0 1\n1 2 0.5") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("0 1 0.5 9"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("0 1 1.5"), Err(Error::Domain(_))));
        assert!(matches!(load("0 1 -0.1"), Err(Error::Domain(_))));
        assert!(matches!(load("0 1 0.5\n0 1 0.2"), Err(Error::Domain(_))));
    }

    #[test]
    fn write_keeps_first_appearance_ids() {
        let g = load("1 2 0.5\n3 4 0.25\n1 5 0.125\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(load_edge_list(&buf[..]).unwrap(), g);
    }

    fn edge_list() -> impl Strategy<Value = Vec<(u64, u64, f64)>> {
        prop::collection::vec((0u64..40, 0u64..40, 1u32..=1000), 0..60).prop_map(|raw| {
            let mut seen = std::collections::HashSet::new();
            raw.into_iter()
                .filter(|&(u, v, _)| u != v && seen.insert((u, v)))
                .map(|(u, v, p)| (u * 7 + 3, v * 7 + 3, p as f64 / 1000.0))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(edges in edge_list()) {
            let text: String = edges.iter().map(|(u, v, p)| format!("{u} {v} {p}\n")).collect();
            let g = load(&text).unwrap();
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            let h = load_edge_list(&buf[..]).unwrap();
            prop_assert_eq!(h, g);
        }
    }
}
