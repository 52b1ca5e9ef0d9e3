//! Univariate polynomial experiment: oracle OLS, full OLS, lasso and
//! cumulative SRL across fitted orders.

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_poly_data, PolyTruth, Polynomial};
use super::metrics::{evaluate_selection, even_grid, rmse_estimation};
use super::ols::ols;
use super::table::SimRow;
use crate::data::{ColumnMeta, Dataset, GroupedDesign};
use crate::error::{invalid, Result, SrlError};
use crate::expand::{expand, ExpansionSpec};
use crate::penalty::{PenaltySpec, Scheme};
use crate::rng::{derive_seed, stream, tag};
use crate::solver::{fit_path, predict_standardized, FitPath, SolverConfig};
use crate::tuning::{cross_validate_full, select_by_ic, Criterion, CvSpec, PenaltyScheme};

pub const EXPERIMENT: &str = "poly";

/// How lasso and SRL pick (gamma, lambda).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolyTuning {
    Bic,
    Cv { folds: usize, repeats: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySimConfig {
    pub truth: PolyTruth,
    pub n: usize,
    pub noise_sd: f64,
    /// Fitted polynomial orders; the largest is the maximum order fit.
    pub orders: Vec<u32>,
    pub replicates: usize,
    pub eval_points: usize,
    pub seed: u64,
    pub tuning: PolyTuning,
    /// Gamma grid for cumulative SRL.
    pub gammas: Vec<f64>,
    pub solver: SolverConfig,
}

impl PolySimConfig {
    /// Defaults of each study: the fixed quadratic is fitted at orders
    /// 2, 4, 6 with BIC over gamma in {0.5, 1, 2}; the other truths at
    /// order 10 with 5-times repeated 10-fold CV over gamma in {0, 0.5, 1}.
    pub fn for_truth(truth: PolyTruth) -> Self {
        let (orders, tuning, gammas) = match truth {
            PolyTruth::QuadraticFixed => (vec![2, 4, 6], PolyTuning::Bic, vec![0.5, 1.0, 2.0]),
            _ => (
                vec![10],
                PolyTuning::Cv {
                    folds: 10,
                    repeats: 5,
                },
                vec![0.0, 0.5, 1.0],
            ),
        };
        Self {
            truth,
            n: 100,
            noise_sd: truth.default_noise_sd(),
            orders,
            replicates: 200,
            eval_points: 50,
            seed: 1,
            tuning,
            gammas,
            solver: SolverConfig::default(),
        }
    }

    pub fn max_order_fit(&self) -> u32 {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() {
            return invalid("no polynomial orders requested");
        }
        for &m in &self.orders {
            ExpansionSpec::polynomials(m)?;
        }
        if matches!(self.truth, PolyTruth::QuadraticFixed | PolyTruth::Linear)
            && self.max_order_fit() < self.truth.order()
        {
            return invalid(format!(
                "maximum fitted order {} is below the true order {}",
                self.max_order_fit(),
                self.truth.order()
            ));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(*g >= 0.0)) {
            return invalid("gamma grid must be nonempty and nonnegative");
        }
        if self.n < 3 || self.eval_points < 1 {
            return invalid("need n >= 3 and at least one evaluation point");
        }
        if !(self.noise_sd >= 0.0) {
            return invalid("noise_sd must be nonnegative");
        }
        if let PolyTuning::Cv { folds, repeats } = self.tuning {
            if folds < 2 || folds > self.n || repeats < 1 {
                return invalid("cv tuning needs 2 <= folds <= n and repeats >= 1");
            }
        }
        self.solver.validate()
    }
}

fn setting(truth: PolyTruth, order: u32) -> String {
    format!("{truth}/order={order}")
}

fn degree_of(meta: &ColumnMeta) -> u32 {
    match *meta {
        ColumnMeta::Polynomial { degree, .. } => degree,
        _ => 1,
    }
}

/// OLS on the design columns whose degree is in `degrees`; returns fitted
/// values on `z_eval`.
fn ols_predict(
    design: &GroupedDesign,
    y: &[f64],
    z_eval: ArrayView2<f64>,
    degrees: &[u32],
) -> Result<(Vec<f64>, Vec<usize>)> {
    let cols: Vec<usize> = (0..design.n_columns())
        .filter(|&j| degrees.contains(&degree_of(&design.column_meta[j])))
        .collect();
    let (beta, a) = ols(design.z.select(Axis(1), &cols).view(), y)?;
    let pred = z_eval
        .rows()
        .into_iter()
        .map(|row| {
            a + cols
                .iter()
                .zip(&beta)
                .map(|(&j, b)| b * row[j])
                .sum::<f64>()
        })
        .collect();
    Ok((pred, cols))
}

struct Context<'a> {
    config: &'a PolySimConfig,
    data: &'a Dataset,
    y: Vec<f64>,
    f: &'a Polynomial,
    grid: &'a [f64],
    x_eval: Array2<f64>,
    replicate: usize,
}

impl Context<'_> {
    fn row(&self, order: u32, framework: &str) -> SimRow {
        SimRow::new(
            EXPERIMENT,
            &setting(self.config.truth, order),
            self.replicate,
            framework,
            self.config.noise_sd,
        )
    }

    fn score(
        &self,
        mut row: SimRow,
        design: &GroupedDesign,
        selected: &[usize],
        estimate: &[f64],
    ) -> SimRow {
        let true_degrees = self.f.support();
        let truth: Vec<usize> = (0..design.n_columns())
            .filter(|&j| true_degrees.contains(&degree_of(&design.column_meta[j])))
            .collect();
        let is_main: Vec<bool> = design.column_meta.iter().map(|m| m.is_main()).collect();
        row = row.with_selection(&evaluate_selection(selected, &truth, &is_main));
        row.rmse = rmse_estimation(|x| self.f.eval(x), estimate, self.grid);
        row
    }

    fn oracle(&self, order: u32) -> Result<SimRow> {
        let degrees = self.f.support();
        let top = degrees.iter().copied().max().unwrap_or(0);
        let mut row = self.row(order, "oracle");
        if top == 0 {
            let mean = self.y.iter().sum::<f64>() / self.y.len() as f64;
            row.rmse = rmse_estimation(|x| self.f.eval(x), &vec![mean; self.grid.len()], self.grid);
            row.n_true = 0;
            row.fdr_overall = 0.0;
            row.fdr_main = 0.0;
            row.fdr_inter = 0.0;
        } else {
            let design = expand(
                self.data.x.view(),
                &self.data.feature_names,
                ExpansionSpec::polynomials(top)?,
            )?;
            let z_eval = design.transform(self.x_eval.view())?;
            let (pred, cols) = ols_predict(&design, &self.y, z_eval.view(), &degrees)?;
            row = self.score(row, &design, &cols, &pred);
        }
        row.converged = true;
        Ok(row)
    }

    fn full_ols(
        &self,
        order: u32,
        design: &GroupedDesign,
        z_eval: ArrayView2<f64>,
    ) -> Result<SimRow> {
        let degrees: Vec<u32> = (1..=order).collect();
        let (pred, cols) = ols_predict(design, &self.y, z_eval, &degrees)?;
        let mut row = self.score(self.row(order, "ols"), design, &cols, &pred);
        row.converged = true;
        Ok(row)
    }

    fn penalized(
        &self,
        order: u32,
        design: &GroupedDesign,
        z_eval: ArrayView2<f64>,
        framework: &str,
        scheme: Scheme,
        gammas: &[f64],
    ) -> Result<SimRow> {
        let row = self.row(order, framework);
        let chosen = match self.config.tuning {
            PolyTuning::Bic => {
                let fits = gammas
                    .iter()
                    .map(|&g| {
                        let spec = PenaltySpec::for_design(design, scheme, g, None)?;
                        fit_path(
                            design,
                            &self.y,
                            &spec,
                            self.data.family,
                            &self.config.solver,
                        )
                    })
                    .collect::<Result<Vec<FitPath>>>()?;
                select_by_ic(&fits, self.data.n(), Criterion::Bic)
                    .map(|(g, k, _)| (gammas[g], fits[g].clone(), k))
            }
            PolyTuning::Cv { folds, repeats } => {
                let cv = CvSpec {
                    folds,
                    repeats,
                    seed: derive_seed(
                        self.config.seed,
                        &[tag::FOLDS, self.replicate as u64, order as u64],
                    ),
                };
                let expansion = ExpansionSpec::polynomials(order)?;
                cross_validate_full(
                    self.data,
                    expansion,
                    &PenaltyScheme::new(scheme),
                    gammas,
                    &cv,
                    &self.config.solver,
                )
                .map(|cvfit| {
                    let (_, fit, k) = cvfit.chosen_fit();
                    (cvfit.cv.chosen.gamma, fit.clone(), k)
                })
            }
        };
        let (gamma, fit, k) = match chosen {
            Ok(c) => c,
            Err(SrlError::NoConvergedFit) => {
                log::warn!(
                    "{} replicate {}: {framework} has no converged fit",
                    row.setting,
                    self.replicate
                );
                return Ok(row);
            }
            Err(e) => return Err(e),
        };
        let pred = predict_standardized(&fit, k, z_eval)?;
        let mut row = self.score(row, design, &fit.support(k), &pred);
        row.converged = fit.converged[k];
        row.gamma = gamma;
        row.lambda = fit.lambdas[k];
        Ok(row)
    }
}

/// One replicate: a single sample shared by every order and method.
pub fn run_poly_replicate(config: &PolySimConfig, replicate: usize) -> Result<Vec<SimRow>> {
    let mut rng = stream(config.seed, &[tag::DATA, replicate as u64]);
    let (data, f) = gen_poly_data(config.truth, config.n, config.noise_sd, &mut rng)?;
    let grid = even_grid(config.eval_points);
    let x_eval = Array2::from_shape_vec((grid.len(), 1), grid.clone()).expect("column");
    let ctx = Context {
        config,
        data: &data,
        y: data.y.to_vec(),
        f: &f,
        grid: &grid,
        x_eval,
        replicate,
    };
    let mut rows = Vec::with_capacity(config.orders.len() * 4);
    for &order in &config.orders {
        let design = expand(
            data.x.view(),
            &data.feature_names,
            ExpansionSpec::polynomials(order)?,
        )?;
        let z_eval = design.transform(ctx.x_eval.view())?;
        rows.push(ctx.oracle(order)?);
        rows.push(ctx.full_ols(order, &design, z_eval.view())?);
        rows.push(ctx.penalized(
            order,
            &design,
            z_eval.view(),
            "lasso",
            Scheme::Lasso,
            &[0.0],
        )?);
        rows.push(ctx.penalized(
            order,
            &design,
            z_eval.view(),
            "srl",
            Scheme::Cumulative,
            &config.gammas,
        )?);
    }
    Ok(rows)
}

/// All replicates, ordered by (replicate, order, method).
pub fn run_poly_experiment(config: &PolySimConfig) -> Result<Vec<SimRow>> {
    config.validate()?;
    let per_rep: Vec<Result<Vec<SimRow>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_poly_replicate(config, r))
        .collect();
    let mut rows = Vec::new();
    for r in per_rep {
        rows.extend(r?);
    }
    Ok(rows)
}
