//! Unpenalized least squares baselines.

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use crate::error::{invalid, Result};

/// Least squares with an intercept: returns `(beta, intercept)`.
///
/// Columns are centered and solved by SVD, so rank-deficient designs get
/// the minimum-norm solution.
pub fn ols(x: ArrayView2<f64>, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (n, q) = x.dim();
    if y.len() != n || n == 0 {
        return invalid(format!("ols: {n} rows but {} responses", y.len()));
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    if q == 0 {
        return Ok((vec![], y_mean));
    }
    let centers: Vec<f64> = (0..q).map(|j| x.column(j).sum() / n as f64).collect();
    let a = DMatrix::from_fn(n, q, |i, j| x[[i, j]] - centers[j]);
    let b = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let svd = a.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let beta = svd
        .solve(&b, eps)
        .map_err(|e| crate::SrlError::InvalidInput(format!("ols: {e}")))?;
    let beta: Vec<f64> = beta.iter().copied().collect();
    let intercept = y_mean - beta.iter().zip(&centers).map(|(b, c)| b * c).sum::<f64>();
    Ok((beta, intercept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn exact_fit() {
        let x = array![[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 1.0], [5.0, 3.0]];
        let y: Vec<f64> = x
            .rows()
            .into_iter()
            .map(|r| 1.5 + 2.0 * r[0] - 0.5 * r[1])
            .collect();
        let (b, a) = ols(x.view(), &y).unwrap();
        assert!((a - 1.5).abs() < 1e-10);
        assert!((b[0] - 2.0).abs() < 1e-10);
        assert!((b[1] + 0.5).abs() < 1e-10);
    }

    #[test]
    fn normal_equations() {
        let x = array![
            [0.1, 1.0],
            [0.7, 0.2],
            [0.4, 0.9],
            [0.9, 0.5],
            [0.3, 0.3],
            [0.6, 0.8]
        ];
        let y = [1.0, 0.5, 2.0, -1.0, 0.3, 0.9];
        let (b, a) = ols(x.view(), &y).unwrap();
        for j in 0..2 {
            let g: f64 = (0..6)
                .map(|i| x[[i, j]] * (y[i] - a - b[0] * x[[i, 0]] - b[1] * x[[i, 1]]))
                .sum();
            assert!(g.abs() < 1e-10);
        }
    }

    #[test]
    fn intercept_only() {
        let x = ndarray::Array2::<f64>::zeros((3, 0));
        let (b, a) = ols(x.view(), &[1.0, 2.0, 6.0]).unwrap();
        assert!(b.is_empty());
        assert_eq!(a, 3.0);
    }
}
