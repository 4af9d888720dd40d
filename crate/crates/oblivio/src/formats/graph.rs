use oblivio_core::graph::{Link, NetworkGraph, NodeId};

use super::LineReader;
use crate::error::{CliError, Result};

/// Parses `nodes <count>` followed by `edge <a> <b>` lines. Edge `i` becomes
/// links `2i = (a, b)` and `2i + 1 = (b, a)`.
pub fn parse_graph(source: &str, text: &str) -> Result<NetworkGraph> {
    let mut r = LineReader::new(source, text);
    let header = r.next_content().ok_or_else(|| r.error("empty graph file"))?;
    let count: u32 = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["nodes", n] => r.number(n, "a node count")?,
        _ => return Err(r.error("expected `nodes <count>`")),
    };
    let mut edges = Vec::new();
    while let Some(line) = r.next_content() {
        match line.split_whitespace().collect::<Vec<_>>()[..] {
            ["edge", a, b] => {
                let a: NodeId = r.number(a, "a node id")?;
                let b: NodeId = r.number(b, "a node id")?;
                if a >= count || b >= count {
                    return Err(r.error(format!("edge ({a}, {b}) uses a node outside 0..{count}")));
                }
                edges.push((a, b));
            }
            _ => return Err(r.error(format!("expected `edge <a> <b>`, found `{line}`"))),
        }
    }
    NetworkGraph::from_edges(count, &edges).map_err(|e| r.error(e.to_string()))
}

/// Inverse of [`parse_graph`]. Fails for networks whose nodes are not
/// `0..n` or whose links are not stored as reverse pairs.
pub fn write_graph(g: &NetworkGraph) -> Result<String> {
    let n = g.node_count();
    if g.nodes().iter().enumerate().any(|(i, &id)| id as usize != i) {
        return Err(CliError::param(
            "only networks with nodes 0..n can be written as graph files",
        ));
    }
    let mut out = format!("nodes {n}\n");
    for pair in g.links().chunks(2) {
        match *pair {
            [Link { tail, head }, back] if back == Link::new(head, tail) => {
                out.push_str(&format!("edge {tail} {head}\n"));
            }
            _ => return Err(CliError::param("graph files need links stored as (a, b), (b, a) pairs")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = NetworkGraph::random(9, 3, 0.5, 11);
        let text = write_graph(&g).unwrap();
        let back = parse_graph("g", &text).unwrap();
        assert_eq!(back.links(), g.links());
        assert_eq!(back.node_count(), 9);
    }

    #[test]
    fn comments_and_errors() {
        let g = parse_graph("g", "# a path\nnodes 3\n\nedge 0 1\n# middle\nedge 1 2\n").unwrap();
        assert_eq!(g.link_count(), 4);
        let err = parse_graph("g", "nodes 2\nedge 0 5\n").unwrap_err().to_string();
        assert!(err.starts_with("g:2:"), "{err}");
        assert!(parse_graph("g", "edge 0 1\n").is_err());
        assert!(parse_graph("g", "nodes 2\nedge 0 1\nedge 1 0\n").is_err());
        assert!(parse_graph("g", "nodes 2\nedge 0 0\n").is_err());
    }
}
