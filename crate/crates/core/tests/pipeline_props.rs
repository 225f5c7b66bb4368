mod common;

use common::*;
use proptest::prelude::*;
use refine_core::{
    apply_filter, build_m, context_weights, make_filter, transition_matrix, DenseMatrix, Kernel,
    ProximityConfig,
};

fn small_graph() -> impl Strategy<Value = (usize, Vec<(u64, u64, f64)>)> {
    (2usize..=50).prop_flat_map(|n| {
        let edge = (0..n as u64, 0..n as u64, 0.1f64..5.0);
        (Just(n), prop::collection::vec(edge, 0..4 * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_rows_sum_to_one((n, edges) in small_graph()) {
        let (g, _) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        for s in t.row_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjacency_is_structurally_symmetric((n, edges) in small_graph()) {
        let (g, _) = graph_of(n, edges);
        let a = g.adjacency();
        let at = a.transpose();
        prop_assert_eq!(a.row_ptr(), at.row_ptr());
        prop_assert_eq!(a.col_idx(), at.col_idx());
        for (x, y) in a.values().iter().zip(at.values()) {
            prop_assert_eq!(x, y);
        }
        for i in 0..g.n() {
            let (cols, _) = g.neighbors(i);
            prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn build_m_matches_dense_definition(
        (n, edges) in small_graph(),
        lambda in 0.2f64..3.0,
        truncate in any::<bool>(),
    ) {
        let (g, edges) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        let cfg = ProximityConfig { lambda, truncate_nonpositive: truncate };
        let m = build_m(&t, &context_weights(&t).unwrap(), &cfg).unwrap();
        let want = dense_m(&dense_transition(&dense_adjacency(n, &edges)), lambda, truncate);
        prop_assert!(max_diff(&to_rows(&m.to_dense()), &want) <= 1e-12);
        if truncate {
            prop_assert!(m.values().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn lambda_shifts_untruncated_entries((n, edges) in small_graph(), lambda in 0.2f64..3.0) {
        let (g, _) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        let cw = context_weights(&t).unwrap();
        let cfg = |lambda| ProximityConfig { lambda, truncate_nonpositive: false };
        let m1 = build_m(&t, &cw, &cfg(1.0)).unwrap();
        let ml = build_m(&t, &cw, &cfg(lambda)).unwrap();
        for (a, b) in m1.values().iter().zip(ml.values()) {
            prop_assert!((a - lambda.ln() - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn filter_matches_dense_polynomial(
        (n, edges) in small_graph(),
        theta in prop::collection::vec(-1.0f64..1.0, 1..5),
        seed in any::<u64>(),
    ) {
        let (g, edges) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        let mut s = seed;
        let r = DenseMatrix::from_fn(n, 3, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let spec = make_filter(Kernel::Custom(theta.clone()), theta.len() - 1).unwrap();
        let got = apply_filter(&t, &r, &spec).unwrap();

        let td = dense_transition(&dense_adjacency(n, &edges));
        let mut power = to_rows(&r);
        let mut want = vec![vec![0.0; 3]; n];
        for (k, &th) in theta.iter().enumerate() {
            if k > 0 {
                power = dense_mul(&td, &power);
            }
            for (w, p) in want.iter_mut().flatten().zip(power.iter().flatten()) {
                *w += th * p;
            }
        }
        prop_assert!(max_diff(&to_rows(&got), &want) <= 1e-10);
    }

    #[test]
    fn filter_is_linear((n, edges) in small_graph(), a in -2.0f64..2.0) {
        let (g, _) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        let spec = make_filter(Kernel::Heat { t: 0.5 }, 2).unwrap();
        let x = DenseMatrix::from_fn(n, 2, |i, j| (i * 3 + j) as f64 % 7.0);
        let y = DenseMatrix::from_fn(n, 2, |i, j| ((i + j) % 3) as f64 - 1.0);
        let mut combo = x.clone();
        combo.add_scaled(a, &y).unwrap();
        let lhs = apply_filter(&t, &combo, &spec).unwrap();
        let mut rhs = apply_filter(&t, &x, &spec).unwrap();
        rhs.add_scaled(a, &apply_filter(&t, &y, &spec).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn identity_filter_returns_input((n, edges) in small_graph()) {
        let (g, _) = graph_of(n, edges);
        let t = transition_matrix(&g).unwrap();
        let r = DenseMatrix::from_fn(n, 4, |i, j| (i as f64 - j as f64) / 3.0);
        let spec = make_filter(Kernel::Custom(vec![1.0, 0.0, 0.0]), 2).unwrap();
        prop_assert!(apply_filter(&t, &r, &spec).unwrap().max_abs_diff(&r) <= 1e-12);
    }
}
