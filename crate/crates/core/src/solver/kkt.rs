use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::cd::dot;
use super::column_major;
use super::path::{linear_predictor_raw, sigmoid, FitPath};
use crate::data::{Family, GroupedDesign};
use crate::error::{Result, SrlError};
use crate::penalty::PenaltySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    Intercept,
    Column(usize),
}

/// A subgradient condition that fails by `magnitude` (beyond `eps`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktViolation {
    pub coordinate: Coordinate,
    pub magnitude: f64,
}

/// Check the optimality conditions of grid point `idx` with gradient
/// `g_j = <x_j, y - mu> / n`:
///
/// * intercept: `|mean(y - mu)| <= eps`
/// * active j: `|g_j - lambda w_j sign(beta_j)| <= eps`
/// * inactive j: `|g_j| <= lambda w_j + eps`
pub fn kkt_violations_matrix(
    x: ArrayView2<f64>,
    y: &[f64],
    col_weights: &[f64],
    family: Family,
    fit: &FitPath,
    idx: usize,
    eps: f64,
) -> Result<Vec<KktViolation>> {
    let (n, q) = x.dim();
    if idx >= fit.len() {
        return Err(SrlError::InvalidInput(format!(
            "lambda index {idx} out of range for a path of length {}",
            fit.len()
        )));
    }
    if y.len() != n {
        return Err(SrlError::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if col_weights.len() != q || fit.n_columns() != q {
        return Err(SrlError::DimensionMismatch {
            expected: q,
            found: col_weights.len().min(fit.n_columns()),
        });
    }
    let xs = column_major(x);
    let beta = &fit.betas[idx];
    let lambda = fit.lambdas[idx];
    let eta = linear_predictor_raw(&xs, n, beta, fit.intercepts[idx]);
    let r: Vec<f64> = match family {
        Family::Gaussian => y.iter().zip(&eta).map(|(y, e)| y - e).collect(),
        Family::Binomial => y.iter().zip(&eta).map(|(y, e)| y - sigmoid(*e)).collect(),
    };
    let nf = n as f64;
    let mut out = Vec::new();
    let mean_r = r.iter().sum::<f64>() / nf;
    if mean_r.abs() > eps {
        out.push(KktViolation {
            coordinate: Coordinate::Intercept,
            magnitude: mean_r.abs(),
        });
    }
    for j in 0..q {
        let w = col_weights[j];
        let b = beta[j];
        let magnitude = if !w.is_finite() {
            if b != 0.0 {
                f64::INFINITY
            } else {
                continue;
            }
        } else {
            let g = dot(&xs[j * n..(j + 1) * n], &r) / nf;
            if b != 0.0 {
                (g - lambda * w * b.signum()).abs()
            } else {
                g.abs() - lambda * w
            }
        };
        if magnitude > eps {
            out.push(KktViolation {
                coordinate: Coordinate::Column(j),
                magnitude,
            });
        }
    }
    Ok(out)
}

pub fn kkt_violations(
    fit: &FitPath,
    design: &GroupedDesign,
    y: &[f64],
    penalty: &PenaltySpec,
    lambda_index: usize,
    eps: f64,
) -> Result<Vec<KktViolation>> {
    kkt_violations_matrix(
        design.z.view(),
        y,
        &penalty.column_weights(design)?,
        fit.family,
        fit,
        lambda_index,
        eps,
    )
}
