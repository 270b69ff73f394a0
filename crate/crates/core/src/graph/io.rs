//! Edge-list files: a `# vertices=N` line, then one `u v` line per edge
//! (0-indexed; parallel edges repeated; a loop written `u u`).

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# vertices={}", g.n_vertices())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty edge-list file".into()))??;
    let n: usize = header
        .trim()
        .strip_prefix("# vertices=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad edge-list header `{header}`")))?;
    let mut edges = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: expected `u v`, got `{line}`", lineno + 2)))
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("line {}: trailing tokens in `{line}`", lineno + 2)));
        }
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_loops_and_multi_edges() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (2, 2), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# vertices=4\n"));
        assert!(text.contains("2 2\n"));
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.degrees(), g.degrees());
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn malformed_files() {
        assert!(read_edge_list("0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("# vertices=2\n0 x\n".as_bytes()).is_err());
        assert!(read_edge_list("# vertices=2\n0 5\n".as_bytes()).is_err());
        assert!(read_edge_list("# vertices=2\n0 1 1\n".as_bytes()).is_err());
    }
}
