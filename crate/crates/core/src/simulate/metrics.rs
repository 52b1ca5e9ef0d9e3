//! Selection and prediction scores.

use serde::{Deserialize, Serialize};

/// Counts and rates for one selected set against the true support.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub n_selected: usize,
    pub n_true: usize,
    pub fdr_overall: f64,
    pub fdr_main: f64,
    pub fdr_inter: f64,
    pub type1_overall: usize,
    pub type1_main: usize,
    pub type1_inter: usize,
    pub type2_overall: usize,
    pub type2_main: usize,
    pub type2_inter: usize,
}

#[derive(Default)]
struct Tally {
    selected: usize,
    fp: usize,
    fn_: usize,
}

impl Tally {
    fn fdr(&self) -> f64 {
        self.fp as f64 / self.selected.max(1) as f64
    }
}

/// Score `selected` against `truth`, both indices into the same expanded
/// column space. `is_main[j]` marks main-effect columns; everything else
/// counts as an interaction (or higher-order) column.
pub fn evaluate_selection(
    selected: &[usize],
    truth: &[usize],
    is_main: &[bool],
) -> SelectionMetrics {
    let q = is_main.len();
    let mut sel = vec![false; q];
    let mut tru = vec![false; q];
    for &j in selected {
        sel[j] = true;
    }
    for &j in truth {
        tru[j] = true;
    }
    let (mut all, mut main, mut inter) = (Tally::default(), Tally::default(), Tally::default());
    for j in 0..q {
        let t = if is_main[j] { &mut main } else { &mut inter };
        for t in [&mut all, t] {
            t.selected += sel[j] as usize;
            t.fp += (sel[j] && !tru[j]) as usize;
            t.fn_ += (!sel[j] && tru[j]) as usize;
        }
    }
    SelectionMetrics {
        n_selected: all.selected,
        n_true: tru.iter().filter(|&&t| t).count(),
        fdr_overall: all.fdr(),
        fdr_main: main.fdr(),
        fdr_inter: inter.fdr(),
        type1_overall: all.fp,
        type1_main: main.fp,
        type1_inter: inter.fp,
        type2_overall: all.fn_,
        type2_main: main.fn_,
        type2_inter: inter.fn_,
    }
}

/// Root-mean-square difference between two equal-length vectors.
pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rmse: length mismatch");
    if a.is_empty() {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

/// `m` evenly spaced points on [0, 1], endpoints included.
pub fn even_grid(m: usize) -> Vec<f64> {
    match m {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..m).map(|i| i as f64 / (m - 1) as f64).collect(),
    }
}

/// Estimation RMSE of `estimate` against `truth` over `grid`.
pub fn rmse_estimation(truth: impl Fn(f64) -> f64, estimate: &[f64], grid: &[f64]) -> f64 {
    let f: Vec<f64> = grid.iter().map(|&x| truth(x)).collect();
    rmse(&f, estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_selection() {
        let is_main = [true, true, false, false];
        let m = evaluate_selection(&[0, 2], &[0, 2], &is_main);
        assert_eq!(
            (m.fdr_overall, m.type1_overall, m.type2_overall),
            (0.0, 0, 0)
        );
    }

    #[test]
    fn empty_selection() {
        let is_main = vec![true; 10];
        let m = evaluate_selection(&[], &[0, 1, 2, 3, 4, 5, 6], &is_main);
        assert_eq!(m.fdr_overall, 0.0);
        assert_eq!(m.type2_overall, 7);
        assert_eq!(m.n_selected, 0);
    }

    #[test]
    fn counting() {
        let is_main = [true, true, false, false];
        let m = evaluate_selection(&[0, 1, 2], &[0], &is_main);
        assert!((m.fdr_overall - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((m.type1_overall, m.type2_overall), (2, 0));
        assert_eq!((m.type1_main, m.type1_inter), (1, 1));
        assert_eq!(m.fdr_main, 0.5);
        assert_eq!(m.fdr_inter, 1.0);
    }

    #[test]
    fn rmse_conventions() {
        let grid = even_grid(50);
        assert_eq!(grid.len(), 50);
        assert_eq!((grid[0], grid[49]), (0.0, 1.0));
        let f = |x: f64| 10.0 * (x - 0.5).powi(2);
        let exact: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        assert_eq!(rmse_estimation(f, &exact, &grid), 0.0);
        let shifted: Vec<f64> = exact.iter().map(|v| v + 1.0).collect();
        assert!((rmse_estimation(f, &shifted, &grid) - 1.0).abs() < 1e-12);
    }

    fn sets() -> impl Strategy<Value = (Vec<bool>, Vec<usize>, Vec<usize>)> {
        (1usize..40).prop_flat_map(|q| {
            (
                proptest::collection::vec(any::<bool>(), q),
                proptest::sample::subsequence((0..q).collect::<Vec<_>>(), 0..=q),
                proptest::sample::subsequence((0..q).collect::<Vec<_>>(), 0..=q),
            )
        })
    }

    proptest! {
        #[test]
        fn metric_identities((is_main, selected, truth) in sets()) {
            let m = evaluate_selection(&selected, &truth, &is_main);
            let tp = selected.iter().filter(|j| truth.contains(j)).count();
            prop_assert_eq!(tp + m.type1_overall, selected.len());
            prop_assert_eq!(tp + m.type2_overall, truth.len());
            prop_assert!((m.fdr_overall * selected.len().max(1) as f64 - m.type1_overall as f64).abs() < 1e-9);
            prop_assert_eq!(m.type1_main + m.type1_inter, m.type1_overall);
            prop_assert_eq!(m.type2_main + m.type2_inter, m.type2_overall);
            for f in [m.fdr_overall, m.fdr_main, m.fdr_inter] {
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }
    }
}
