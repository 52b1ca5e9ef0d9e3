use ndarray::ArrayView2;

use super::column_major;
use super::path::{linear_predictor_raw, sigmoid, FitPath};
use crate::data::{Family, GroupedDesign};
use crate::error::{Result, SrlError};

/// `b0 + Z beta` at grid point `idx` for an already-standardized design.
pub fn linear_predictor(fit: &FitPath, idx: usize, z: ArrayView2<f64>) -> Result<Vec<f64>> {
    if idx >= fit.len() {
        return Err(SrlError::InvalidInput(format!(
            "lambda index {idx} out of range for a path of length {}",
            fit.len()
        )));
    }
    if z.ncols() != fit.n_columns() {
        return Err(SrlError::DimensionMismatch {
            expected: fit.n_columns(),
            found: z.ncols(),
        });
    }
    let zs = column_major(z);
    Ok(linear_predictor_raw(
        &zs,
        z.nrows(),
        &fit.betas[idx],
        fit.intercepts[idx],
    ))
}

/// Mean response (gaussian) or probability (binomial) for standardized rows.
pub fn predict_standardized(fit: &FitPath, idx: usize, z: ArrayView2<f64>) -> Result<Vec<f64>> {
    let eta = linear_predictor(fit, idx, z)?;
    Ok(match fit.family {
        Family::Gaussian => eta,
        Family::Binomial => eta.into_iter().map(sigmoid).collect(),
    })
}

/// Predict for raw feature rows, replaying the design's expansion and standardization.
pub fn predict(
    fit: &FitPath,
    idx: usize,
    x_new: ArrayView2<f64>,
    design: &GroupedDesign,
) -> Result<Vec<f64>> {
    let z = design.transform(x_new)?;
    predict_standardized(fit, idx, z.view())
}
