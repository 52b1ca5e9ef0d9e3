use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng;

/// Fold labels for each repeat: `assignments[r][i]` is the fold of row i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Folds {
    pub k: usize,
    pub assignments: Vec<Vec<usize>>,
}

impl Folds {
    pub fn repeats(&self) -> usize {
        self.assignments.len()
    }

    /// (training rows, held-out rows) for fold `fold` of repeat `repeat`.
    pub fn split(&self, repeat: usize, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let labels = &self.assignments[repeat];
        (0..labels.len()).partition(|&i| labels[i] != fold)
    }

    pub fn fold_sizes(&self, repeat: usize) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments[repeat] {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Random near-equal partition of `0..n` into `k` folds, once per repeat.
pub fn make_folds(n: usize, k: usize, repeats: usize, seed: u64) -> Result<Folds> {
    if k < 2 {
        return invalid(format!("need at least 2 folds, got {k}"));
    }
    if k > n {
        return invalid(format!("{k} folds requested for {n} observations"));
    }
    if repeats < 1 {
        return invalid("need at least one repeat");
    }
    let mut rng = rng::stream(seed, &[rng::tag::FOLDS]);
    let assignments = (0..repeats)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut labels = vec![0; n];
            for (pos, &i) in order.iter().enumerate() {
                labels[i] = pos % k;
            }
            labels
        })
        .collect();
    Ok(Folds { k, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_division() {
        let f = make_folds(10, 5, 1, 1).unwrap();
        assert_eq!(f.fold_sizes(0), vec![2; 5]);
    }

    #[test]
    fn remainder_spread() {
        let f = make_folds(11, 5, 1, 1).unwrap();
        let mut sizes = f.fold_sizes(0);
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(
            make_folds(10, 5, 2, 9).unwrap(),
            make_folds(10, 5, 2, 9).unwrap()
        );
        assert_ne!(
            make_folds(50, 5, 1, 9).unwrap(),
            make_folds(50, 5, 1, 10).unwrap()
        );
    }

    #[test]
    fn invalid_requests() {
        assert!(make_folds(4, 5, 1, 0).is_err());
        assert!(make_folds(4, 1, 1, 0).is_err());
        assert!(make_folds(4, 2, 0, 0).is_err());
    }

    proptest! {
        #[test]
        fn folds_partition_rows(n in 2usize..200, k in 2usize..12, repeats in 1usize..4, seed: u64) {
            prop_assume!(k <= n);
            let f = make_folds(n, k, repeats, seed).unwrap();
            for r in 0..repeats {
                let sizes = f.fold_sizes(r);
                prop_assert_eq!(sizes.iter().sum::<usize>(), n);
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
                let mut seen = vec![false; n];
                for fold in 0..k {
                    let (train, test) = f.split(r, fold);
                    prop_assert_eq!(train.len() + test.len(), n);
                    for i in test {
                        prop_assert!(!seen[i]);
                        seen[i] = true;
                    }
                }
                prop_assert!(seen.iter().all(|s| *s));
            }
        }
    }
}
