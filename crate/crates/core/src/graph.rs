//! Undirected weighted graphs in CSR form.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// What to do with nodes that end up with no incident edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IsolatedPolicy {
    /// Give the node a unit self-loop so `D^-1` exists.
    #[default]
    SelfLoop,
    /// Remove the node and renumber the rest densely.
    Drop,
}

/// Symmetric CSR adjacency with per-node weighted degree.
///
/// Every undirected edge `{i, j}` is stored as the arcs `(i, j)` and `(j, i)`
/// carrying the same weight; a self-loop is stored once. Neighbor lists are
/// sorted and duplicate-free, and every node has positive degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    weight: Vec<f64>,
    degree: Vec<f64>,
    /// Input id of each dense node, present only when ids were renumbered.
    original_ids: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` edges.
    ///
    /// Edges are symmetrized and arcs repeated in the input have their weights
    /// summed. Node ids run up to the largest id seen; under
    /// [`IsolatedPolicy::Drop`] ids are renumbered to skip nodes without edges.
    pub fn from_edges(
        edges: impl IntoIterator<Item = (u64, u64, f64)>,
        policy: IsolatedPolicy,
    ) -> Result<Graph> {
        let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
        let mut max_id: Option<u64> = None;
        for (u, v, w) in edges {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::domain(alloc::format!(
                    "edge ({u},{v}) has weight {w}; weights must be positive and finite"
                )));
            }
            let hi = u.max(v);
            if hi >= u32::MAX as u64 {
                return Err(Error::domain(alloc::format!(
                    "node id {hi} exceeds u32 range"
                )));
            }
            max_id = Some(max_id.map_or(hi, |m| m.max(hi)));
            arcs.push((u as u32, v as u32, w));
            if u != v {
                arcs.push((v as u32, u as u32, w));
            }
        }
        let Some(max_id) = max_id else {
            return Err(Error::domain("edge list is empty"));
        };
        let n = max_id as usize + 1;

        let (row_ptr, col_idx, weight) = assemble_rows(n, arcs);
        let mut g = Graph::from_csr_parts(n, row_ptr, col_idx, weight, None);

        let isolated: Vec<usize> = (0..n).filter(|&i| g.degree[i] == 0.0).collect();
        if isolated.is_empty() {
            return Ok(g);
        }
        match policy {
            IsolatedPolicy::SelfLoop => {
                let arcs = g
                    .arcs()
                    .map(|(i, j, w)| (i as u32, j as u32, w))
                    .chain(isolated.iter().map(|&i| (i as u32, i as u32, 1.0)))
                    .collect();
                let (row_ptr, col_idx, weight) = assemble_rows(n, arcs);
                g = Graph::from_csr_parts(n, row_ptr, col_idx, weight, None);
            }
            IsolatedPolicy::Drop => {
                let mut new_id = vec![u32::MAX; n];
                let mut original = Vec::with_capacity(n - isolated.len());
                for (i, slot) in new_id.iter_mut().enumerate() {
                    if g.degree[i] > 0.0 {
                        *slot = original.len() as u32;
                        original.push(i as u64);
                    }
                }
                let m = original.len();
                let arcs = g
                    .arcs()
                    .map(|(i, j, w)| (new_id[i], new_id[j], w))
                    .collect();
                let (row_ptr, col_idx, weight) = assemble_rows(m, arcs);
                g = Graph::from_csr_parts(m, row_ptr, col_idx, weight, Some(original));
            }
        }
        Ok(g)
    }

    fn from_csr_parts(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        weight: Vec<f64>,
        original_ids: Option<Vec<u64>>,
    ) -> Graph {
        let degree = (0..n)
            .map(|i| weight[row_ptr[i]..row_ptr[i + 1]].iter().sum())
            .collect();
        Graph {
            n,
            row_ptr,
            col_idx,
            weight,
            degree,
            original_ids,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored directed arcs (self-loops count once).
    pub fn num_arcs(&self) -> usize {
        self.col_idx.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn num_edges(&self) -> usize {
        self.arcs().filter(|&(i, j, _)| i <= j).count()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn neighbors(&self, i: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.weight[s..e])
    }

    /// Input id of dense node `i`.
    pub fn original_id(&self, i: usize) -> u64 {
        self.original_ids.as_ref().map_or(i as u64, |ids| ids[i])
    }

    /// The renumbering table, if ids were renumbered.
    pub fn original_ids(&self) -> Option<&[u64]> {
        self.original_ids.as_deref()
    }

    /// All stored arcs `(i, j, w)` in row order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (c, w) = self.neighbors(i);
            c.iter().zip(w).map(move |(&j, &x)| (i, j as usize, x))
        })
    }

    /// Each undirected edge once, as `(i, j, w)` with `i <= j`.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.arcs().filter(|&(i, j, _)| i <= j)
    }

    /// The adjacency matrix `A`.
    pub fn adjacency(&self) -> SparseMatrix {
        SparseMatrix::from_parts_unchecked(
            self.n,
            self.n,
            self.row_ptr.clone(),
            self.col_idx.clone(),
            self.weight.clone(),
        )
    }
}

/// Counting-sorts arcs into rows, then sorts and merges each row.
fn assemble_rows(n: usize, arcs: Vec<(u32, u32, f64)>) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
    let mut counts = vec![0usize; n + 1];
    for &(i, _, _) in &arcs {
        counts[i as usize + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut next = counts.clone();
    let mut slots: Vec<(u32, f64)> = vec![(0, 0.0); arcs.len()];
    for (i, j, w) in arcs {
        slots[next[i as usize]] = (j, w);
        next[i as usize] += 1;
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::with_capacity(slots.len());
    let mut weight = Vec::with_capacity(slots.len());
    for i in 0..n {
        let row = &mut slots[counts[i]..counts[i + 1]];
        row.sort_unstable_by_key(|&(j, _)| j);
        let start = col_idx.len();
        for &(j, w) in row.iter() {
            if col_idx.len() > start && *col_idx.last().unwrap() == j {
                *weight.last_mut().unwrap() += w;
            } else {
                col_idx.push(j);
                weight.push(w);
            }
        }
        row_ptr.push(col_idx.len());
    }
    (row_ptr, col_idx, weight)
}

/// Row-stochastic transition matrix `T = D^-1 A`.
///
/// The same matrix supplies the degree-normalized adjacency entries `p_ij`
/// used to build the proximity matrix.
pub fn transition_matrix(g: &Graph) -> Result<SparseMatrix> {
    if let Some(i) = g.degree.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::domain(alloc::format!(
            "node {i} has zero degree; apply isolated-node handling first"
        )));
    }
    let mut values = Vec::with_capacity(g.weight.len());
    for i in 0..g.n {
        let d = g.degree[i];
        let (_, w) = g.neighbors(i);
        values.extend(w.iter().map(|x| x / d));
    }
    Ok(SparseMatrix::from_parts_unchecked(
        g.n,
        g.n,
        g.row_ptr.clone(),
        g.col_idx.clone(),
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(
            edges.iter().map(|&(u, v)| (u, v, 1.0)),
            IsolatedPolicy::SelfLoop,
        )
        .unwrap()
    }

    #[test]
    fn path_graph() {
        let g = unit(&[(0, 1), (1, 2)]);
        assert_eq!(g.n(), 3);
        let arcs: Vec<_> = g.arcs().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(arcs, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(g.degree(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn duplicate_weights_are_summed() {
        let g = Graph::from_edges([(0, 1, 2.0), (0, 1, 3.0)], IsolatedPolicy::SelfLoop).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.degree(), &[5.0, 5.0]);
        assert_eq!(g.weights(), &[5.0, 5.0]);
    }

    #[test]
    fn self_loop_stored_once() {
        let g = Graph::from_edges([(0, 0, 2.0), (0, 1, 1.0)], IsolatedPolicy::SelfLoop).unwrap();
        assert_eq!(g.neighbors(0), (&[0u32, 1][..], &[2.0, 1.0][..]));
        assert_eq!(g.degree(), &[3.0, 1.0]);
    }

    #[test]
    fn isolated_nodes_get_self_loops() {
        let g = unit(&[(0, 2)]);
        assert_eq!(g.n(), 3);
        assert_eq!(g.neighbors(1), (&[1u32][..], &[1.0][..]));
        assert!(g.original_ids().is_none());
    }

    #[test]
    fn isolated_nodes_dropped_and_renumbered() {
        let g = Graph::from_edges([(3, 7, 1.0), (7, 9, 1.0)], IsolatedPolicy::Drop).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.original_ids(), Some(&[3u64, 7, 9][..]));
        assert_eq!(g.degree(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.original_id(2), 9);
    }

    #[test]
    fn rejects_bad_weights_and_empty_input() {
        assert!(Graph::from_edges([(0, 1, -1.0)], IsolatedPolicy::SelfLoop).is_err());
        assert!(Graph::from_edges([(0, 1, f64::NAN)], IsolatedPolicy::SelfLoop).is_err());
        assert!(Graph::from_edges([], IsolatedPolicy::SelfLoop).is_err());
    }

    #[test]
    fn transition_of_triangle() {
        let p = transition_matrix(&unit(&[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.5));
        assert!(p.row_sums().iter().all(|&s| (s - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn transition_of_path() {
        let p = transition_matrix(&unit(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(p.row(0).1, &[1.0]);
        assert_eq!(p.row(1).1, &[0.5, 0.5]);
        assert_eq!(p.row(2).1, &[1.0]);
    }

    #[test]
    fn transition_of_star_matches_dense_oracle() {
        let g = unit(&[(0, 1), (0, 2), (0, 3)]);
        let p = transition_matrix(&g).unwrap().to_dense();
        // D^-1 A by hand on the dense adjacency.
        let a = g.adjacency().to_dense();
        for i in 0..4 {
            let d: f64 = a.row(i).iter().sum();
            for j in 0..4 {
                assert_eq!(p.get(i, j), a.get(i, j) / d);
            }
        }
        assert_eq!(p.row(0), &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(p.row(2), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn transition_rejects_zero_degree() {
        let g = Graph::from_csr_parts(2, vec![0, 0, 0], vec![], vec![], None);
        assert!(transition_matrix(&g).is_err());
    }
}
