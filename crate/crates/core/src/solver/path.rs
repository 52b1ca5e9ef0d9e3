use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::cd::{dot, CoordinateDescent};
use super::{check_response, column_major, lambda_grid, lambda_max_matrix, SolverConfig};
use crate::data::{Family, GroupedDesign};
use crate::error::{invalid, Result, SrlError};
use crate::penalty::PenaltySpec;

/// IRLS working weights are floored at p(1-p) for p = 1e-5.
const PROB_FLOOR: f64 = 1e-5;
const MAX_IRLS: usize = 100;

/// Solutions along a decreasing lambda grid, on the standardized scale.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPath {
    pub family: Family,
    pub n_obs: usize,
    pub lambdas: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    /// Gaussian: residual sum of squares. Binomial: -2 log-likelihood.
    pub deviance: Vec<f64>,
    pub null_deviance: f64,
    pub df: Vec<usize>,
    pub n_iter: Vec<usize>,
    pub converged: Vec<bool>,
    /// Binomial only: some fitted probability fell outside [1e-5, 1 - 1e-5].
    pub saturated: Vec<bool>,
}

impl FitPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.betas.first().map_or(0, Vec::len)
    }

    /// Indices of nonzero coefficients at grid point `idx`.
    pub fn support(&self, idx: usize) -> Vec<usize> {
        self.betas[idx]
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn to_record(&self) -> FitPathRecord {
        FitPathRecord {
            family: self.family,
            n_obs: self.n_obs,
            n_columns: self.n_columns(),
            lambdas: self.lambdas.clone(),
            intercepts: self.intercepts.clone(),
            deviance: self.deviance.clone(),
            null_deviance: self.null_deviance,
            df: self.df.clone(),
            n_iter: self.n_iter.clone(),
            converged: self.converged.clone(),
            saturated: self.saturated.clone(),
            nonzero: (0..self.len())
                .map(|k| {
                    self.support(k)
                        .into_iter()
                        .map(|j| (j, self.betas[k][j]))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<FitPathRecord>(s)?.into_path()
    }
}

/// Serialized form of a path: coefficients stored as sparse (index, value) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPathRecord {
    pub family: Family,
    pub n_obs: usize,
    pub n_columns: usize,
    pub lambdas: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub deviance: Vec<f64>,
    pub null_deviance: f64,
    pub df: Vec<usize>,
    pub n_iter: Vec<usize>,
    pub converged: Vec<bool>,
    pub saturated: Vec<bool>,
    pub nonzero: Vec<Vec<(usize, f64)>>,
}

impl FitPathRecord {
    pub fn into_path(self) -> Result<FitPath> {
        let k = self.lambdas.len();
        for len in [
            self.intercepts.len(),
            self.deviance.len(),
            self.df.len(),
            self.n_iter.len(),
            self.converged.len(),
            self.saturated.len(),
            self.nonzero.len(),
        ] {
            if len != k {
                return Err(SrlError::DimensionMismatch {
                    expected: k,
                    found: len,
                });
            }
        }
        let mut betas = Vec::with_capacity(k);
        for pairs in &self.nonzero {
            let mut beta = vec![0.0; self.n_columns];
            for &(j, v) in pairs {
                if j >= self.n_columns {
                    return invalid(format!("coefficient index {j} out of range"));
                }
                beta[j] = v;
            }
            betas.push(beta);
        }
        Ok(FitPath {
            family: self.family,
            n_obs: self.n_obs,
            lambdas: self.lambdas,
            betas,
            intercepts: self.intercepts,
            deviance: self.deviance,
            null_deviance: self.null_deviance,
            df: self.df,
            n_iter: self.n_iter,
            converged: self.converged,
            saturated: self.saturated,
        })
    }
}

#[inline]
pub(crate) fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// -2 log-likelihood of 0/1 outcomes under logits `eta`.
pub(crate) fn binomial_deviance(y: &[f64], eta: &[f64]) -> f64 {
    2.0 * y
        .iter()
        .zip(eta)
        .map(|(&yi, &e)| yi * softplus(-e) + (1.0 - yi) * softplus(e))
        .sum::<f64>()
}

pub(crate) fn linear_predictor_raw(x: &[f64], n: usize, beta: &[f64], intercept: f64) -> Vec<f64> {
    let mut eta = vec![intercept; n];
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            eta.iter_mut()
                .zip(&x[j * n..(j + 1) * n])
                .for_each(|(e, v)| *e += b * v);
        }
    }
    eta
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

struct PathBuilder {
    path: FitPath,
    early_stop: bool,
}

impl PathBuilder {
    fn push(
        &mut self,
        lambda: f64,
        beta: Vec<f64>,
        intercept: f64,
        dev: f64,
        iters: usize,
        ok: bool,
        sat: bool,
    ) -> bool {
        let p = &mut self.path;
        p.df.push(beta.iter().filter(|b| **b != 0.0).count());
        p.lambdas.push(lambda);
        p.betas.push(beta);
        p.intercepts.push(intercept);
        p.deviance.push(dev);
        p.n_iter.push(iters);
        p.converged.push(ok);
        p.saturated.push(sat);
        if !self.early_stop || p.len() < 2 {
            return true;
        }
        let explained = p.null_deviance - dev;
        let prev = p.null_deviance - p.deviance[p.len() - 2];
        if explained > 0.999 * p.null_deviance {
            return false;
        }
        !(explained > 0.0 && explained - prev < 1e-5 * explained)
    }
}

/// Fit the full path on a raw matrix with per-column penalty weights.
///
/// With `lambdas = None` the grid runs from lambda_max down to
/// `lambda_max * min_ratio` and its first point is the exact null model.
pub fn fit_path_matrix(
    x: ArrayView2<f64>,
    y: &[f64],
    col_weights: &[f64],
    family: Family,
    config: &SolverConfig,
    lambdas: Option<&[f64]>,
) -> Result<FitPath> {
    config.validate()?;
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
    if let Some(w) = col_weights.iter().find(|w| !(**w > 0.0)) {
        return invalid(format!("penalty weights must be positive, got {w}"));
    }
    let (grid, first_is_null) = match lambdas {
        None => {
            let lmax = lambda_max_matrix(x, y, col_weights, family)?;
            (
                lambda_grid(lmax, config.min_ratio_for(n, q), config.n_lambda),
                true,
            )
        }
        Some(l) => {
            if l.is_empty() {
                return invalid("empty lambda sequence");
            }
            if l.iter().any(|v| !(*v > 0.0 && v.is_finite())) || l.windows(2).any(|w| w[0] <= w[1])
            {
                return invalid("lambda sequence must be positive and strictly decreasing");
            }
            (l.to_vec(), false)
        }
    };
    let ybar = check_response(y, family)?;
    let xs = column_major(x);
    let null_deviance = match family {
        Family::Gaussian => y.iter().map(|v| (v - ybar).powi(2)).sum(),
        Family::Binomial => binomial_deviance(y, &vec![logit(ybar); n]),
    };
    let mut builder = PathBuilder {
        path: FitPath {
            family,
            n_obs: n,
            lambdas: Vec::with_capacity(grid.len()),
            betas: Vec::with_capacity(grid.len()),
            intercepts: Vec::with_capacity(grid.len()),
            deviance: Vec::with_capacity(grid.len()),
            null_deviance,
            df: Vec::with_capacity(grid.len()),
            n_iter: Vec::with_capacity(grid.len()),
            converged: Vec::with_capacity(grid.len()),
            saturated: Vec::with_capacity(grid.len()),
        },
        early_stop: config.early_stop && lambdas.is_none(),
    };
    match family {
        Family::Gaussian => gaussian_path(
            &xs,
            n,
            y,
            ybar,
            col_weights,
            &grid,
            first_is_null,
            config,
            &mut builder,
        ),
        Family::Binomial => binomial_path(
            &xs,
            n,
            y,
            ybar,
            col_weights,
            &grid,
            first_is_null,
            config,
            &mut builder,
        ),
    }
    Ok(builder.path)
}

#[allow(clippy::too_many_arguments)]
fn gaussian_path(
    x: &[f64],
    n: usize,
    y: &[f64],
    ybar: f64,
    weights: &[f64],
    grid: &[f64],
    first_is_null: bool,
    config: &SolverConfig,
    out: &mut PathBuilder,
) {
    let q = weights.len();
    let mut cd = CoordinateDescent::new(x, n, weights, None, y, grid[0], vec![0.0; q], ybar);
    for (k, &lambda) in grid.iter().enumerate() {
        cd.set_lambda(lambda);
        let (iters, ok) = if k == 0 && first_is_null {
            cd.reset(y, ybar);
            (0, true)
        } else {
            cd.solve(config.tol, config.max_iter, config.active_set)
        };
        let rss = dot(cd.residuals(), cd.residuals());
        if !out.push(
            lambda,
            cd.beta().to_vec(),
            cd.intercept(),
            rss,
            iters,
            ok,
            false,
        ) {
            break;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn binomial_path(
    x: &[f64],
    n: usize,
    y: &[f64],
    ybar: f64,
    weights: &[f64],
    grid: &[f64],
    first_is_null: bool,
    config: &SolverConfig,
    out: &mut PathBuilder,
) {
    let q = weights.len();
    let null_intercept = logit(ybar);
    let mut beta = vec![0.0; q];
    let mut intercept = null_intercept;
    let vmin = PROB_FLOOR * (1.0 - PROB_FLOOR);
    let mut v = vec![0.0; n];
    let mut u = vec![0.0; n];
    for (k, &lambda) in grid.iter().enumerate() {
        let mut iters = 0;
        let mut ok = true;
        if k == 0 && first_is_null {
            beta.iter_mut().for_each(|b| *b = 0.0);
            intercept = null_intercept;
        } else {
            ok = false;
            for _ in 0..MAX_IRLS {
                let eta = linear_predictor_raw(x, n, &beta, intercept);
                for i in 0..n {
                    let p = sigmoid(eta[i]);
                    v[i] = (p * (1.0 - p)).max(vmin);
                    u[i] = eta[i] + (y[i] - p) / v[i];
                }
                let mut cd = CoordinateDescent::new(
                    x,
                    n,
                    weights,
                    Some(&v),
                    &u,
                    lambda,
                    beta.clone(),
                    intercept,
                );
                let budget = config.max_iter.saturating_sub(iters).max(1);
                let (it, inner_ok) = cd.solve(config.tol, budget, config.active_set);
                iters += it;
                let mut change = cd.weight_mean().sqrt() * (cd.intercept() - intercept).abs();
                for j in 0..q {
                    change = change.max(cd.curvature()[j].sqrt() * (cd.beta()[j] - beta[j]).abs());
                }
                let (b, a) = cd.into_parts();
                beta = b;
                intercept = a;
                if !inner_ok || iters >= config.max_iter {
                    break;
                }
                if change < config.tol {
                    ok = true;
                    break;
                }
            }
        }
        let eta = linear_predictor_raw(x, n, &beta, intercept);
        let sat = eta.iter().any(|&e| {
            let p = sigmoid(e);
            !(PROB_FLOOR..=1.0 - PROB_FLOOR).contains(&p)
        });
        let dev = binomial_deviance(y, &eta);
        if !out.push(lambda, beta.clone(), intercept, dev, iters, ok, sat) {
            break;
        }
    }
}

/// Fit the path for a grouped design under `penalty`.
pub fn fit_path(
    design: &GroupedDesign,
    y: &[f64],
    penalty: &PenaltySpec,
    family: Family,
    config: &SolverConfig,
) -> Result<FitPath> {
    fit_path_matrix(
        design.z.view(),
        y,
        &penalty.column_weights(design)?,
        family,
        config,
        None,
    )
}

/// Fit at a caller-supplied strictly decreasing lambda sequence (cold start
/// at its first value).
pub fn fit_path_with_lambdas(
    design: &GroupedDesign,
    y: &[f64],
    penalty: &PenaltySpec,
    family: Family,
    config: &SolverConfig,
    lambdas: &[f64],
) -> Result<FitPath> {
    fit_path_matrix(
        design.z.view(),
        y,
        &penalty.column_weights(design)?,
        family,
        config,
        Some(lambdas),
    )
}
