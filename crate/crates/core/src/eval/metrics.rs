use alloc::vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F1Scores {
    pub micro: f64,
    /// Unweighted mean over all `n_labels` labels.
    pub macro_: f64,
}

/// Micro- and Macro-F1 of aligned predicted / true label sets.
///
/// Labels that neither occur in the truth nor get predicted score 0 and still
/// count in the Macro average.
pub fn f1_scores(
    predicted: &[alloc::vec::Vec<u32>],
    truth: &[alloc::vec::Vec<u32>],
    n_labels: usize,
) -> F1Scores {
    assert_eq!(
        predicted.len(),
        truth.len(),
        "prediction and truth not aligned"
    );
    let mut tp = vec![0u64; n_labels];
    let mut fp = vec![0u64; n_labels];
    let mut fn_ = vec![0u64; n_labels];
    for (pred, gold) in predicted.iter().zip(truth) {
        for &l in pred {
            if gold.contains(&l) {
                tp[l as usize] += 1;
            } else {
                fp[l as usize] += 1;
            }
        }
        for &l in gold {
            if !pred.contains(&l) {
                fn_[l as usize] += 1;
            }
        }
    }
    let f1 = |tp: u64, fp: u64, fn_: u64| {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let micro = f1(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum());
    let macro_ = if n_labels == 0 {
        0.0
    } else {
        (0..n_labels).map(|l| f1(tp[l], fp[l], fn_[l])).sum::<f64>() / n_labels as f64
    };
    F1Scores { micro, macro_ }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn perfect_predictions() {
        let t: Vec<Vec<u32>> = vec![vec![0], vec![1], vec![0, 1]];
        assert_eq!(
            f1_scores(&t, &t, 2),
            F1Scores {
                micro: 1.0,
                macro_: 1.0
            }
        );
    }

    #[test]
    fn all_wrong() {
        let p = vec![vec![1], vec![0]];
        let t = vec![vec![0], vec![1]];
        assert_eq!(
            f1_scores(&p, &t, 2),
            F1Scores {
                micro: 0.0,
                macro_: 0.0
            }
        );
    }

    #[test]
    fn hand_confusion_counts() {
        // A (0): TP=1 FP=1 FN=0. B (1): TP=0 FP=0 FN=1.
        let p = vec![vec![0], vec![0]];
        let t = vec![vec![0], vec![1]];
        let s = f1_scores(&p, &t, 2);
        assert_eq!(s.micro, 0.5);
        assert_eq!(s.macro_, (2.0 / 3.0) / 2.0);
    }

    #[test]
    fn absent_labels_count_as_zero() {
        let t = vec![vec![0]];
        assert_eq!(f1_scores(&t, &t, 4).macro_, 0.25);
    }
}
