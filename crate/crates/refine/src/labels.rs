//! Label files: `node label1 [label2 ...]` per line, repeated node lines
//! merging their labels.

use std::io::BufRead;

use refine_core::eval::LabelSet;

use crate::edgelist::{fields, is_skippable};
use crate::error::{Error, Result};

/// Loads labels for `n` nodes. `resolve` maps a node id from the file to a
/// row index, returning `None` for nodes that are not part of the embedding;
/// their lines are skipped with a warning.
pub fn load_labels(
    reader: impl BufRead,
    n: usize,
    resolve: impl Fn(u64) -> Option<usize>,
) -> Result<LabelSet> {
    let mut set = LabelSet::new(n);
    let mut skipped = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if is_skippable(&line) {
            continue;
        }
        let mut it = fields(&line);
        let tok = it.next().expect("non-empty line has a field");
        let node: u64 = tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad node id {tok:?}")))?;
        let labels = it
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::parse(lineno, format!("bad label id {t:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        match resolve(node).filter(|&i| i < n) {
            Some(row) => labels.into_iter().for_each(|l| set.insert(row, l)),
            None => {
                if skipped == 0 {
                    log::warn!("line {lineno}: unknown node {node}, skipping");
                }
                skipped += 1;
            }
        }
    }
    if skipped > 1 {
        log::warn!("skipped {skipped} label lines for unknown nodes");
    }
    Ok(set)
}

/// Node ids are row indices.
pub fn load_labels_dense(reader: impl BufRead, n: usize) -> Result<LabelSet> {
    load_labels(reader, n, |id| usize::try_from(id).ok())
}
