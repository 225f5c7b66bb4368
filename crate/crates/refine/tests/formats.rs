use proptest::prelude::*;
use refine::embfile::{read_embedding, write_embedding, Embedding, Format};
use refine::labels::load_labels_dense;
use refine_core::DenseMatrix;

fn embedding() -> impl Strategy<Value = Embedding> {
    (1usize..20, 1usize..10).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(any::<u64>(), n),
            prop::collection::vec(-1e6f64..1e6, n * k),
        )
            .prop_map(move |(ids, data)| Embedding {
                ids,
                matrix: DenseMatrix::from_vec(n, k, data).unwrap(),
            })
    })
}

proptest! {
    #[test]
    fn text_round_trip_to_printed_precision(emb in embedding()) {
        let mut buf = Vec::new();
        write_embedding(&mut buf, &emb, Format::Text).unwrap();
        let back = read_embedding(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.ids, &emb.ids);
        for (a, b) in back.matrix.as_slice().iter().zip(emb.matrix.as_slice()) {
            prop_assert!((a - b).abs() <= 5e-6 * b.abs() + 1e-300);
        }
        let mut again = Vec::new();
        write_embedding(&mut again, &back, Format::Text).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn binary_round_trip_is_bit_identical(emb in embedding()) {
        let mut buf = Vec::new();
        write_embedding(&mut buf, &emb, Format::Binary).unwrap();
        let back = read_embedding(buf.as_slice()).unwrap();
        for (a, b) in back.matrix.as_slice().iter().zip(emb.matrix.as_slice()) {
            prop_assert_eq!(a.to_bits(), (*b as f32 as f64).to_bits());
        }
        let mut again = Vec::new();
        write_embedding(&mut again, &back, Format::Binary).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn label_lines_merge(lines in prop::collection::vec((0u64..10, prop::collection::vec(0u32..8, 0..4)), 0..30)) {
        let text: String = lines
            .iter()
            .map(|(n, ls)| {
                let mut s = n.to_string();
                for l in ls {
                    s.push_str(&format!(" {l}"));
                }
                s + "\n"
            })
            .collect();
        let set = load_labels_dense(text.as_bytes(), 10).unwrap();
        for node in 0..10u64 {
            let mut want: Vec<u32> = lines.iter().filter(|(n, _)| *n == node).flat_map(|(_, l)| l.clone()).collect();
            want.sort_unstable();
            want.dedup();
            prop_assert_eq!(set.labels(node as usize), want.as_slice());
        }
    }
}
