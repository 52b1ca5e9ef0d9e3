//! Cyclic coordinate descent for a weighted least-squares loss with a
//! per-column weighted L1 penalty and an unpenalized intercept:
//!
//! `(1/2n) sum_i v_i (u_i - b0 - x_i' beta)^2 + lambda sum_j w_j |beta_j|`
//!
//! With `v = 1` and `u = y` this is the gaussian lasso objective; the
//! binomial solver calls it once per IRLS step with working weights and
//! working response.

use nalgebra::{DMatrix, DVector};

use super::soft_threshold;

/// Sweeps between Anderson extrapolation attempts.
const ANDERSON_DEPTH: usize = 5;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn dot3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x * y * z).sum()
}

/// Coordinate-descent state for one penalized weighted least-squares problem.
pub struct CoordinateDescent<'a> {
    x: &'a [f64],
    n: usize,
    penalty: &'a [f64],
    obs_weights: Option<&'a [f64]>,
    curvature: Vec<f64>,
    weight_mean: f64,
    lambda: f64,
    beta: Vec<f64>,
    intercept: f64,
    resid: Vec<f64>,
}

impl<'a> CoordinateDescent<'a> {
    /// `x` is column-major with `n` rows; `penalty[j]` is the weight of
    /// column j (infinite weights pin the coefficient at zero).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x: &'a [f64],
        n: usize,
        penalty: &'a [f64],
        obs_weights: Option<&'a [f64]>,
        target: &[f64],
        lambda: f64,
        beta: Vec<f64>,
        intercept: f64,
    ) -> Self {
        let q = penalty.len();
        assert_eq!(x.len(), n * q, "design size does not match penalty length");
        assert_eq!(beta.len(), q);
        assert_eq!(target.len(), n);
        let nf = n as f64;
        let curvature = (0..q)
            .map(|j| {
                let col = &x[j * n..(j + 1) * n];
                match obs_weights {
                    None => dot(col, col) / nf,
                    Some(v) => dot3(v, col, col) / nf,
                }
            })
            .collect();
        let weight_mean = obs_weights.map_or(1.0, |v| v.iter().sum::<f64>() / nf);
        let mut resid: Vec<f64> = target.iter().map(|t| t - intercept).collect();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                let col = &x[j * n..(j + 1) * n];
                resid.iter_mut().zip(col).for_each(|(r, c)| *r -= b * c);
            }
        }
        Self {
            x,
            n,
            penalty,
            obs_weights,
            curvature,
            weight_mean,
            lambda,
            beta,
            intercept,
            resid,
        }
    }

    pub fn set_lambda(&mut self, lambda: f64) {
        self.lambda = lambda;
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn residuals(&self) -> &[f64] {
        &self.resid
    }

    /// `(1/n) sum_i v_i x_ij^2` for each column.
    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub(crate) fn weight_mean(&self) -> f64 {
        self.weight_mean
    }

    pub fn into_parts(self) -> (Vec<f64>, f64) {
        (self.beta, self.intercept)
    }

    /// Reset to the all-zero penalized solution with the given intercept.
    pub fn reset(&mut self, target: &[f64], intercept: f64) {
        self.beta.iter_mut().for_each(|b| *b = 0.0);
        self.intercept = intercept;
        self.resid
            .iter_mut()
            .zip(target)
            .for_each(|(r, t)| *r = t - intercept);
    }

    pub fn objective(&self) -> f64 {
        let nf = self.n as f64;
        let loss = match self.obs_weights {
            None => dot(&self.resid, &self.resid),
            Some(v) => dot3(v, &self.resid, &self.resid),
        } / (2.0 * nf);
        let pen: f64 = self
            .beta
            .iter()
            .zip(self.penalty)
            .filter(|(b, _)| **b != 0.0)
            .map(|(b, w)| w * b.abs())
            .sum();
        loss + self.lambda * pen
    }

    /// Exact minimization over the intercept; returns the scaled change.
    fn update_intercept(&mut self) -> f64 {
        let delta = match self.obs_weights {
            None => self.resid.iter().sum::<f64>() / self.n as f64,
            Some(v) => dot(v, &self.resid) / (self.n as f64 * self.weight_mean),
        };
        if delta != 0.0 {
            self.intercept += delta;
            self.resid.iter_mut().for_each(|r| *r -= delta);
        }
        self.weight_mean.sqrt() * delta.abs()
    }

    /// Exact minimization over coordinate j; returns `sqrt(curvature_j) |change|`.
    fn update(&mut self, j: usize) -> f64 {
        let c = self.curvature[j];
        if c <= 0.0 {
            return 0.0;
        }
        let col = &self.x[j * self.n..(j + 1) * self.n];
        let grad = match self.obs_weights {
            None => dot(col, &self.resid),
            Some(v) => dot3(v, col, &self.resid),
        } / self.n as f64;
        let old = self.beta[j];
        let new = soft_threshold(grad + c * old, self.lambda * self.penalty[j]) / c;
        let delta = new - old;
        if delta != 0.0 {
            self.beta[j] = new;
            self.resid
                .iter_mut()
                .zip(col)
                .for_each(|(r, x)| *r -= delta * x);
        }
        c.sqrt() * delta.abs()
    }

    /// One cyclic pass over the intercept and every penalizable column.
    pub fn sweep(&mut self) -> f64 {
        let mut change = self.update_intercept();
        for j in 0..self.penalty.len() {
            if self.penalty[j].is_finite() {
                change = change.max(self.update(j));
            }
        }
        change
    }

    fn sweep_subset(&mut self, cols: &[usize]) -> f64 {
        let mut change = self.update_intercept();
        for &j in cols {
            change = change.max(self.update(j));
        }
        change
    }

    /// Anderson extrapolation over the last iterates of `cols`, carried out
    /// in curvature-scaled coordinates so it is invariant to column scaling.
    /// The extrapolated point is kept only if it lowers the objective.
    fn extrapolate(&mut self, cols: &[usize], history: &[Vec<f64>]) -> bool {
        let k = history.len() - 1;
        let diffs: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                history[i + 1]
                    .iter()
                    .zip(&history[i])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let mut gram = DMatrix::from_fn(k, k, |a, b| dot(&diffs[a], &diffs[b]));
        let scale = gram.diagonal().max();
        if !(scale > 0.0) {
            return false;
        }
        for i in 0..k {
            gram[(i, i)] += 1e-12 * scale;
        }
        let Some(z) = gram
            .cholesky()
            .map(|c| c.solve(&DVector::from_element(k, 1.0)))
        else {
            return false;
        };
        let total = z.sum();
        if !total.is_finite() || total == 0.0 {
            return false;
        }
        let before = self.objective();
        let old: Vec<f64> = cols.iter().map(|&j| self.beta[j]).collect();
        for (pos, &j) in cols.iter().enumerate() {
            let s: f64 = (0..k).map(|i| z[i] * history[i + 1][pos]).sum::<f64>() / total;
            let new = s / self.curvature[j].sqrt();
            if !new.is_finite() {
                return false;
            }
            self.beta[j] = new;
        }
        self.shift_residuals(cols, &old);
        if self.objective() < before {
            true
        } else {
            let tried: Vec<f64> = cols.iter().map(|&j| self.beta[j]).collect();
            for (pos, &j) in cols.iter().enumerate() {
                self.beta[j] = old[pos];
            }
            self.shift_residuals(cols, &tried);
            false
        }
    }

    /// Update residuals after `beta[cols]` moved away from `old`.
    fn shift_residuals(&mut self, cols: &[usize], old: &[f64]) {
        for (pos, &j) in cols.iter().enumerate() {
            let delta = self.beta[j] - old[pos];
            if delta != 0.0 {
                let col = &self.x[j * self.n..(j + 1) * self.n];
                self.resid
                    .iter_mut()
                    .zip(col)
                    .for_each(|(r, x)| *r -= delta * x);
            }
        }
    }

    fn scaled(&self, cols: &[usize]) -> Vec<f64> {
        cols.iter()
            .map(|&j| self.curvature[j].sqrt() * self.beta[j])
            .collect()
    }

    /// Iterate to convergence: a full sweep fixes the active set, the active
    /// set is iterated until it settles (with periodic Anderson
    /// extrapolation), then another full sweep checks that no inactive
    /// coordinate wants to move. Returns (sweeps, converged).
    pub fn solve(&mut self, tol: f64, max_iter: usize, active_set: bool) -> (usize, bool) {
        let mut iters = 0;
        loop {
            let change = self.sweep();
            iters += 1;
            if change < tol {
                return (iters, true);
            }
            if iters >= max_iter {
                return (iters, false);
            }
            if !active_set {
                continue;
            }
            let active: Vec<usize> = (0..self.beta.len())
                .filter(|&j| self.beta[j] != 0.0)
                .collect();
            let mut history = vec![self.scaled(&active)];
            loop {
                let change = self.sweep_subset(&active);
                iters += 1;
                if change < tol {
                    break;
                }
                if iters >= max_iter {
                    return (iters, false);
                }
                history.push(self.scaled(&active));
                if history.len() > ANDERSON_DEPTH {
                    self.extrapolate(&active, &history);
                    history.clear();
                    history.push(self.scaled(&active));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|i| 3.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn single_column_closed_form() {
        // x standardized, so the solution is soft_threshold(<x,y>/n, lambda).
        let x = [-1.0, 1.0, -1.0, 1.0];
        let y = [0.0, 2.0, 1.0, 3.0];
        let pen = [1.0];
        let mut cd = CoordinateDescent::new(&x, 4, &pen, None, &y, 0.25, vec![0.0], 0.0);
        let (_, ok) = cd.solve(1e-12, 100, true);
        assert!(ok);
        assert!((cd.beta()[0] - 0.75).abs() < 1e-12);
        assert!((cd.intercept() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn infinite_penalty_pins_zero() {
        let x = [-1.0, 1.0, -1.0, 1.0];
        let y = [0.0, 2.0, 1.0, 3.0];
        let pen = [f64::INFINITY];
        let mut cd = CoordinateDescent::new(&x, 4, &pen, None, &y, 0.01, vec![0.0], 0.0);
        cd.solve(1e-12, 100, true);
        assert_eq!(cd.beta()[0], 0.0);
    }
}
