//! Pathwise coordinate descent for the weighted-L1 objective
//!
//! `(1/2n) ||y - b0 - Z beta||^2 + lambda sum_j w_j |beta_j|`   (gaussian)
//! `(1/n) sum_i nll_i(b0 + z_i' beta) + lambda sum_j w_j |beta_j|` (binomial)
//!
//! solved over a decreasing lambda grid with warm starts. The binomial family
//! uses IRLS outer iterations around the same weighted coordinate descent.

mod cd;
mod kkt;
pub(crate) mod path;
mod predict;

use std::borrow::Cow;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

pub use cd::CoordinateDescent;
pub use kkt::{kkt_violations, kkt_violations_matrix, Coordinate, KktViolation};
pub use path::{fit_path, fit_path_matrix, fit_path_with_lambdas, FitPath, FitPathRecord};
pub use predict::{linear_predictor, predict, predict_standardized};

use crate::data::{Family, GroupedDesign};
use crate::error::{invalid, Result, SrlError};
use crate::penalty::PenaltySpec;

pub(crate) use cd::dot;

/// `sign(z) * max(|z| - t, 0)`.
#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub n_lambda: usize,
    /// Smallest lambda as a fraction of lambda_max; `None` picks 1e-3 when
    /// the design has at least as many columns as rows, else 1e-4.
    pub lambda_min_ratio: Option<f64>,
    /// Convergence threshold on the largest coefficient change, measured as
    /// `sqrt(curvature_j) |delta beta_j|` (plain change for standardized columns).
    pub tol: f64,
    /// Cap on coordinate sweeps per lambda.
    pub max_iter: usize,
    pub active_set: bool,
    /// Stop the path once the deviance explained saturates (> 0.999) or its
    /// relative gain between consecutive lambdas falls below 1e-5.
    pub early_stop: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_lambda: 100,
            lambda_min_ratio: None,
            tol: 1e-7,
            max_iter: 10_000,
            active_set: true,
            early_stop: false,
        }
    }
}

impl SolverConfig {
    pub fn min_ratio_for(&self, n: usize, q: usize) -> f64 {
        self.lambda_min_ratio
            .unwrap_or(if q >= n { 1e-3 } else { 1e-4 })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_lambda < 1 {
            return invalid("n_lambda must be at least 1");
        }
        if let Some(r) = self.lambda_min_ratio {
            if !(r > 0.0 && r < 1.0) {
                return invalid(format!("lambda_min_ratio must lie in (0, 1), got {r}"));
            }
        }
        if !(self.tol > 0.0) {
            return invalid("tol must be positive");
        }
        if self.max_iter < 1 {
            return invalid("max_iter must be at least 1");
        }
        Ok(())
    }
}

/// Column-major contiguous view of `x`, copying only when necessary.
pub(crate) fn column_major(x: ArrayView2<'_, f64>) -> Cow<'_, [f64]> {
    let t = x.reversed_axes();
    match t.to_slice() {
        Some(s) => Cow::Borrowed(s),
        None => Cow::Owned(t.iter().copied().collect()),
    }
}

pub(crate) fn check_response(y: &[f64], family: Family) -> Result<f64> {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    if family == Family::Binomial {
        if let Some((row, &value)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            return Err(SrlError::NonBinaryResponse { value, row });
        }
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(SrlError::ConstantResponse);
    }
    Ok(mean)
}

/// Smallest lambda at which every penalized coefficient is zero:
/// `max_j |<x_j, y - ybar>| / (n w_j)` over columns with finite weight.
pub fn lambda_max_matrix(
    x: ArrayView2<f64>,
    y: &[f64],
    col_weights: &[f64],
    family: Family,
) -> Result<f64> {
    let (n, q) = x.dim();
    if y.len() != n {
        return Err(SrlError::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if col_weights.len() != q {
        return Err(SrlError::DimensionMismatch {
            expected: q,
            found: col_weights.len(),
        });
    }
    let mean = check_response(y, family)?;
    let r: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let xs = column_major(x);
    let mut best: Option<f64> = None;
    for (j, &w) in col_weights.iter().enumerate() {
        if !w.is_finite() {
            continue;
        }
        if !(w > 0.0) {
            return invalid(format!("column {j} has non-positive penalty weight {w}"));
        }
        let g = dot(&xs[j * n..(j + 1) * n], &r).abs() / (n as f64 * w);
        best = Some(best.map_or(g, |b: f64| b.max(g)));
    }
    match best {
        None => invalid("no column has a finite penalty weight"),
        Some(v) if v > 0.0 => Ok(v),
        Some(_) => invalid("response is orthogonal to every column; lambda_max is zero"),
    }
}

pub fn lambda_max(
    design: &GroupedDesign,
    y: &[f64],
    penalty: &PenaltySpec,
    family: Family,
) -> Result<f64> {
    lambda_max_matrix(design.z.view(), y, &penalty.column_weights(design)?, family)
}

/// Log-spaced decreasing grid from `lmax` to `lmax * ratio`.
pub fn lambda_grid(lmax: f64, ratio: f64, n_lambda: usize) -> Vec<f64> {
    if n_lambda == 1 {
        return vec![lmax];
    }
    let step = ratio.ln() / (n_lambda - 1) as f64;
    (0..n_lambda)
        .map(|k| {
            if k == 0 {
                lmax
            } else {
                lmax * (step * k as f64).exp()
            }
        })
        .collect()
}
