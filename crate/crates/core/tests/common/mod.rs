#![allow(dead_code)]

use refine_core::{DenseMatrix, Graph, IsolatedPolicy};

/// Dense symmetric adjacency of an undirected weighted edge list.
pub fn dense_adjacency(n: usize, edges: &[(u64, u64, f64)]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        let (u, v) = (u as usize, v as usize);
        a[u][v] += w;
        if u != v {
            a[v][u] += w;
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        if row.iter().all(|&x| x == 0.0) {
            row[i] = 1.0;
        }
    }
    a
}

pub fn dense_transition(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|row| {
            let d: f64 = row.iter().sum();
            row.iter().map(|x| x / d).collect()
        })
        .collect()
}

/// Log-ratio matrix straight from the definition, on dense storage.
pub fn dense_m(t: &[Vec<f64>], lambda: f64, truncate: bool) -> Vec<Vec<f64>> {
    let n = t.len();
    let total: f64 = t.iter().flatten().sum();
    let phi: Vec<f64> = (0..n)
        .map(|j| t.iter().map(|r| r[j]).sum::<f64>() / total)
        .collect();
    t.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &p)| {
                    if p == 0.0 {
                        return 0.0;
                    }
                    let v = (p / (lambda * phi[j])).ln();
                    if truncate && v <= 0.0 {
                        0.0
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

pub fn dense_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn to_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Edge list over nodes `0..n` where node `n - 1` always appears, so the
/// graph has exactly `n` nodes.
pub fn graph_of(n: usize, mut edges: Vec<(u64, u64, f64)>) -> (Graph, Vec<(u64, u64, f64)>) {
    edges.push((0, n as u64 - 1, 1.0));
    let g = Graph::from_edges(edges.iter().copied(), IsolatedPolicy::SelfLoop).unwrap();
    (g, edges)
}
