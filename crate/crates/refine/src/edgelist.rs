//! Whitespace- or comma-separated edge lists: `u v [w]` per line.
//!
//! Lines starting with `#` or `%` are comments. A missing weight means 1.

use std::io::{BufRead, Write};

use refine_core::{Graph, IsolatedPolicy};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct EdgeListOptions {
    /// Ignore a third column even when present.
    pub unweighted: bool,
    pub isolated: IsolatedPolicy,
}

pub(crate) fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
}

pub(crate) fn is_skippable(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#') || t.starts_with('%')
}

/// Reads raw `(u, v, w)` triples.
pub fn read_edges(reader: impl BufRead, opts: &EdgeListOptions) -> Result<Vec<(u64, u64, f64)>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if is_skippable(&line) {
            continue;
        }
        let mut it = fields(&line);
        let mut id = |what: &str| -> Result<u64> {
            let tok = it
                .next()
                .ok_or_else(|| Error::parse(lineno, format!("missing {what} node id")))?;
            tok.parse()
                .map_err(|_| Error::parse(lineno, format!("bad {what} node id {tok:?}")))
        };
        let u = id("source")?;
        let v = id("target")?;
        let w = match it.next() {
            Some(tok) if !opts.unweighted => {
                let w: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad weight {tok:?}")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::parse(
                        lineno,
                        format!("weight must be positive and finite, got {w}"),
                    ));
                }
                w
            }
            _ => 1.0,
        };
        edges.push((u, v, w));
    }
    Ok(edges)
}

pub fn load_edge_list(reader: impl BufRead, opts: &EdgeListOptions) -> Result<Graph> {
    let edges = read_edges(reader, opts)?;
    Ok(Graph::from_edges(edges, opts.isolated)?)
}

/// Writes each undirected edge once as `u v w`, using original node ids.
pub fn write_edge_list(mut w: impl Write, g: &Graph) -> Result<()> {
    for (i, j, weight) in g.undirected_edges() {
        writeln!(w, "{} {} {}", g.original_id(i), g.original_id(j), weight)?;
    }
    Ok(())
}
