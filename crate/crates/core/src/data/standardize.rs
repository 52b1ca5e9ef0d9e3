use ndarray::{Array2, ArrayView1, ArrayView2, Axis, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrlError};

/// Centering and scaling applied to each retained column.
///
/// `centers` and `scales` are indexed by retained column; `retained[i]` is the
/// input column that became output column `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub centers: Vec<f64>,
    pub scales: Vec<f64>,
    pub retained: Vec<usize>,
    pub dropped: Vec<usize>,
}

impl StandardizationParams {
    pub fn n_retained(&self) -> usize {
        self.retained.len()
    }
}

/// Population mean and standard deviation (divide-by-n).
pub(crate) fn mean_sd(col: ArrayView1<f64>) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.sum() / n;
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub(crate) fn is_constant(mean: f64, sd: f64) -> bool {
    sd <= 1e-12 * mean.abs().max(1.0)
}

/// Center each column to mean 0 and scale to population sd 1.
///
/// Zero-variance columns are dropped and listed in `params.dropped`. The
/// returned matrix is column-major.
pub fn standardize(x: ArrayView2<f64>) -> Result<(Array2<f64>, StandardizationParams)> {
    let (n, p) = x.dim();
    if n < 2 {
        return Err(SrlError::InvalidInput(format!(
            "standardization needs at least 2 rows, found {n}"
        )));
    }
    let mut params = StandardizationParams {
        centers: Vec::with_capacity(p),
        scales: Vec::with_capacity(p),
        retained: Vec::with_capacity(p),
        dropped: Vec::new(),
    };
    for (j, col) in x.axis_iter(Axis(1)).enumerate() {
        let (mean, sd) = mean_sd(col);
        if is_constant(mean, sd) {
            params.dropped.push(j);
        } else {
            params.centers.push(mean);
            params.scales.push(sd);
            params.retained.push(j);
        }
    }
    if params.retained.is_empty() {
        return Err(SrlError::AllColumnsConstant);
    }
    let q = params.retained.len();
    let mut data = Vec::with_capacity(n * q);
    for (i, &j) in params.retained.iter().enumerate() {
        let (c, s) = (params.centers[i], params.scales[i]);
        data.extend(x.column(j).iter().map(|v| (v - c) / s));
    }
    let z = Array2::from_shape_vec((n, q).f(), data).expect("shape matches data length");
    Ok((z, params))
}

/// Map coefficients fitted on standardized columns back to the raw (retained) columns.
pub fn destandardize(
    beta_std: &[f64],
    intercept_std: f64,
    params: &StandardizationParams,
) -> Result<(Vec<f64>, f64)> {
    if beta_std.len() != params.n_retained() {
        return Err(SrlError::DimensionMismatch {
            expected: params.n_retained(),
            found: beta_std.len(),
        });
    }
    let beta_raw: Vec<f64> = beta_std
        .iter()
        .zip(&params.scales)
        .map(|(b, s)| b / s)
        .collect();
    let shift: f64 = beta_raw
        .iter()
        .zip(&params.centers)
        .map(|(b, c)| b * c)
        .sum();
    Ok((beta_raw, intercept_std - shift))
}
