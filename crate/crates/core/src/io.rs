//! Plain-text edge-list format.
//!
//! Lines starting with `#` are comments and blank lines are skipped. The
//! first data line is `n m`, followed by exactly `m` lines `u v w`, where the
//! weight `w` may be omitted and defaults to 1. Serialization emits the same
//! format with edges in id order, so a load/serialize round trip preserves
//! the graph exactly.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::graph::{Graph, GraphError, Weight};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

fn parse_err(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_count(tok: &str, what: &str, line: usize) -> Result<usize, LoadError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_weight(tok: &str, line: usize) -> Result<Weight, LoadError> {
    if let Ok(w) = tok.parse::<Weight>() {
        return Ok(w);
    }
    if tok.parse::<i128>().map_or(false, |x| x < 0) {
        return Err(parse_err(line, format!("negative weight `{tok}`")));
    }
    Err(parse_err(line, format!("invalid weight `{tok}`")))
}

pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph, LoadError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows: Vec<(usize, usize, Weight, usize)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        match header {
            None => {
                if toks.len() != 2 {
                    return Err(parse_err(line_no, "expected header `n m`"));
                }
                let n = parse_count(toks[0], "vertex count", line_no)?;
                let m = parse_count(toks[1], "edge count", line_no)?;
                header = Some((n, m, line_no));
            }
            Some((_, m, _)) => {
                if rows.len() == m {
                    return Err(parse_err(
                        line_no,
                        format!("unexpected data after {m} edge lines"),
                    ));
                }
                if toks.len() < 2 || toks.len() > 3 {
                    return Err(parse_err(line_no, "expected `u v` or `u v w`"));
                }
                let u = parse_count(toks[0], "vertex id", line_no)?;
                let v = parse_count(toks[1], "vertex id", line_no)?;
                let w = if toks.len() == 3 {
                    parse_weight(toks[2], line_no)?
                } else {
                    1
                };
                rows.push((u, v, w, line_no));
            }
        }
    }
    let (n, m, header_line) = header.ok_or_else(|| parse_err(1, "missing header `n m`"))?;
    if rows.len() != m {
        return Err(parse_err(
            header_line,
            format!("header declares {m} edges but {} were given", rows.len()),
        ));
    }
    // Validate row by row so constraint violations report the right line.
    let mut seen = std::collections::BTreeSet::new();
    let mut accepted: Vec<(usize, usize, Weight)> = Vec::with_capacity(m);
    for &(u, v, w, line_no) in &rows {
        let bad = if u >= n || v >= n {
            Some(GraphError::VertexOutOfRange {
                vertex: if u >= n { u } else { v },
                n,
            })
        } else if u == v {
            Some(GraphError::SelfLoop { vertex: u })
        } else if !seen.insert((u.min(v), u.max(v))) {
            Some(GraphError::DuplicateEdge {
                u: u.min(v),
                v: u.max(v),
            })
        } else {
            None
        };
        if let Some(source) = bad {
            return Err(LoadError::Graph {
                line: line_no,
                source,
            });
        }
        accepted.push((u, v, w));
    }
    Ok(Graph::new(n, accepted).expect("validated above"))
}

pub fn parse_graph(text: &str) -> Result<Graph, LoadError> {
    load_graph(text.as_bytes())
}

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w)?;
    }
    Ok(())
}

pub fn graph_to_string(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_graph(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge list output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_defaults_and_weights() {
        let g = parse_graph("# sample\n3 2\n0 1\n\n1 2 7\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge(0).w, 1);
        assert_eq!(g.edge(1).w, 7);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_graph("3 2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(err.to_string(), "line 3: invalid vertex id `x`");

        let err = parse_graph("3 2\n0 1\n1 2 -4\n").unwrap_err();
        assert_eq!(err.to_string(), "line 3: negative weight `-4`");

        let err = parse_graph("2 1\n0 0\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: self-loop at vertex 0");

        let err = parse_graph("3 2\n0 1\n1 0\n").unwrap_err();
        assert_eq!(err.to_string(), "line 3: duplicate edge {0, 1}");

        let err = parse_graph("2 1\n0 5\n").unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn edge_count_must_match() {
        assert!(parse_graph("3 2\n0 1\n").is_err());
        assert!(parse_graph("3 1\n0 1\n1 2\n").is_err());
    }

    #[test]
    fn round_trip_preserves_graph() {
        let g = parse_graph("4 3\n0 1 2\n1 2 1\n3 0 9\n").unwrap();
        let again = parse_graph(&graph_to_string(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn zero_edges_and_empty_graph() {
        let g = parse_graph("1 0\n").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 0);
    }
}
