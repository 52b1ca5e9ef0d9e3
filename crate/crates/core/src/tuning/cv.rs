use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{make_folds, Folds};
use super::select::{select_rule, Choice, SelectionRule};
use crate::data::{Dataset, Family, GroupedDesign};
use crate::error::{invalid, Result, SrlError};
use crate::expand::{expand, ExpansionSpec};
use crate::penalty::{PenaltySpec, Scheme};
use crate::solver::path::binomial_deviance;
use crate::solver::{fit_path, fit_path_with_lambdas, linear_predictor, FitPath, SolverConfig};

/// K-fold cross-validation, repeated with fresh partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSpec {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        Self {
            folds: 10,
            repeats: 1,
            seed: 1,
        }
    }
}

/// Penalty family to tune: a scheme plus, for `custom`, its group weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyScheme {
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_weights: Option<Vec<f64>>,
}

impl PenaltyScheme {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            custom_weights: None,
        }
    }

    pub fn custom(weights: Vec<f64>) -> Self {
        Self {
            scheme: Scheme::Custom,
            custom_weights: Some(weights),
        }
    }

    pub fn resolve(&self, design: &GroupedDesign, gamma: f64) -> Result<PenaltySpec> {
        PenaltySpec::for_design(design, self.scheme, gamma, self.custom_weights.as_deref())
    }
}

/// Cross-validated loss surface over (gamma, lambda).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub family: Family,
    pub gammas: Vec<f64>,
    /// Lambda grid per gamma, taken from the full-data fit.
    pub lambdas: Vec<Vec<f64>>,
    /// Mean held-out loss per (gamma, lambda): MSE (gaussian) or deviance per observation (binomial).
    pub cv_loss: Vec<Vec<f64>>,
    pub cv_se: Vec<Vec<f64>>,
    /// Points left out of selection because some fit there did not converge.
    pub excluded: Vec<Vec<bool>>,
    /// Held-out loss per (gamma, lambda, fold), folds ordered by (repeat, fold).
    pub fold_losses: Vec<Vec<Vec<f64>>>,
    /// (repeat, fold, held-out size) of every fold that contributed.
    pub fold_index: Vec<(usize, usize, usize)>,
    /// Folds dropped because the training response was constant.
    pub dropped_folds: Vec<(usize, usize)>,
    pub folds: Folds,
    pub seed: u64,
    pub chosen: Choice,
}

impl CvResult {
    /// Long-format loss surface: gamma, lambda_index, lambda, cv_loss, cv_se, excluded.
    pub fn write_loss_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "gamma",
            "lambda_index",
            "lambda",
            "cv_loss",
            "cv_se",
            "excluded",
        ])?;
        for (g, gamma) in self.gammas.iter().enumerate() {
            for (k, lambda) in self.lambdas[g].iter().enumerate() {
                out.write_record([
                    gamma.to_string(),
                    k.to_string(),
                    lambda.to_string(),
                    self.cv_loss[g][k].to_string(),
                    self.cv_se[g][k].to_string(),
                    self.excluded[g][k].to_string(),
                ])?;
            }
        }
        out.flush()
            .map_err(|e| SrlError::InvalidInput(e.to_string()))?;
        Ok(())
    }
}

/// Cross-validation output together with the full-data fits it was built on.
#[derive(Debug, Clone)]
pub struct CvFit {
    pub cv: CvResult,
    pub design: GroupedDesign,
    pub penalties: Vec<PenaltySpec>,
    pub fits: Vec<FitPath>,
}

impl CvFit {
    pub fn chosen_fit(&self) -> (&PenaltySpec, &FitPath, usize) {
        let c = &self.cv.chosen;
        (
            &self.penalties[c.gamma_index],
            &self.fits[c.gamma_index],
            c.lambda_index,
        )
    }
}

struct FoldOutcome {
    size: usize,
    losses: Vec<Vec<f64>>,
    converged: Vec<Vec<bool>>,
}

/// Held-out loss of `fit` at each grid point.
pub(crate) fn heldout_losses(
    fit: &FitPath,
    z: ndarray::ArrayView2<f64>,
    y: &[f64],
) -> Result<Vec<f64>> {
    let n = y.len() as f64;
    (0..fit.len())
        .map(|k| {
            let eta = linear_predictor(fit, k, z)?;
            Ok(match fit.family {
                Family::Gaussian => {
                    eta.iter().zip(y).map(|(e, y)| (y - e).powi(2)).sum::<f64>() / n
                }
                Family::Binomial => binomial_deviance(y, &eta) / n,
            })
        })
        .collect()
}

/// Expansion and standardization fitted on `rows` only.
pub fn fold_design(
    dataset: &Dataset,
    expansion: ExpansionSpec,
    rows: &[usize],
) -> Result<GroupedDesign> {
    let train = dataset.subset(rows);
    expand(train.x.view(), &train.feature_names, expansion)
}

fn run_fold(
    dataset: &Dataset,
    expansion: ExpansionSpec,
    penalty: &PenaltyScheme,
    gammas: &[f64],
    grids: &[Vec<f64>],
    folds: &Folds,
    repeat: usize,
    fold: usize,
    config: &SolverConfig,
) -> Result<Option<FoldOutcome>> {
    let (train_rows, test_rows) = folds.split(repeat, fold);
    let design = fold_design(dataset, expansion, &train_rows)?;
    let y_train: Vec<f64> = train_rows.iter().map(|&i| dataset.y[i]).collect();
    let test = dataset.subset(&test_rows);
    let z_test = design.transform(test.x.view())?;
    let y_test = test.y.to_vec();
    let mut losses = Vec::with_capacity(gammas.len());
    let mut converged = Vec::with_capacity(gammas.len());
    for (g, &gamma) in gammas.iter().enumerate() {
        let spec = penalty.resolve(&design, gamma)?;
        let fit = match fit_path_with_lambdas(
            &design,
            &y_train,
            &spec,
            dataset.family,
            config,
            &grids[g],
        ) {
            Ok(f) => f,
            Err(SrlError::ConstantResponse) => {
                log::warn!(
                    "fold {fold} of repeat {repeat}: constant training response, fold dropped"
                );
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        losses.push(heldout_losses(&fit, z_test.view(), &y_test)?);
        converged.push(fit.converged.clone());
    }
    Ok(Some(FoldOutcome {
        size: test_rows.len(),
        losses,
        converged,
    }))
}

/// Cross-validate the penalty over `gammas` and a shared lambda grid per gamma.
///
/// Each fold re-expands and re-standardizes on its training rows only. The
/// lambda grid for each gamma comes from the full-data fit.
pub fn cross_validate_full(
    dataset: &Dataset,
    expansion: ExpansionSpec,
    penalty: &PenaltyScheme,
    gammas: &[f64],
    cv: &CvSpec,
    config: &SolverConfig,
) -> Result<CvFit> {
    if gammas.is_empty() {
        return invalid("gamma grid is empty");
    }
    let folds = make_folds(dataset.n(), cv.folds, cv.repeats, cv.seed)?;
    let design = expand(dataset.x.view(), &dataset.feature_names, expansion)?;
    let y = dataset.y.to_vec();
    let mut penalties = Vec::with_capacity(gammas.len());
    let mut fits = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let spec = penalty.resolve(&design, gamma)?;
        fits.push(fit_path(&design, &y, &spec, dataset.family, config)?);
        penalties.push(spec);
    }
    let grids: Vec<Vec<f64>> = fits.iter().map(|f| f.lambdas.clone()).collect();

    let tasks: Vec<(usize, usize)> = (0..cv.repeats)
        .flat_map(|r| (0..cv.folds).map(move |f| (r, f)))
        .collect();
    let outcomes: Vec<Result<Option<FoldOutcome>>> = tasks
        .par_iter()
        .map(|&(r, f)| {
            run_fold(
                dataset, expansion, penalty, gammas, &grids, &folds, r, f, config,
            )
        })
        .collect();

    let mut kept = Vec::new();
    let mut fold_index = Vec::new();
    let mut dropped_folds = Vec::new();
    for (&(r, f), outcome) in tasks.iter().zip(outcomes) {
        match outcome? {
            Some(o) => {
                fold_index.push((r, f, o.size));
                kept.push(o);
            }
            None => dropped_folds.push((r, f)),
        }
    }
    if kept.is_empty() {
        return Err(SrlError::ConstantResponse);
    }

    let total: f64 = kept.iter().map(|o| o.size as f64).sum();
    let n_folds = kept.len() as f64;
    let mut cv_loss = Vec::new();
    let mut cv_se = Vec::new();
    let mut excluded = Vec::new();
    let mut fold_losses = Vec::new();
    for g in 0..gammas.len() {
        let m = grids[g].len();
        let mut loss_g = Vec::with_capacity(m);
        let mut se_g = Vec::with_capacity(m);
        let mut excl_g = Vec::with_capacity(m);
        let mut detail_g = Vec::with_capacity(m);
        for k in 0..m {
            let per_fold: Vec<f64> = kept.iter().map(|o| o.losses[g][k]).collect();
            let mean = kept
                .iter()
                .zip(&per_fold)
                .map(|(o, l)| o.size as f64 * l)
                .sum::<f64>()
                / total;
            let var = kept
                .iter()
                .zip(&per_fold)
                .map(|(o, l)| o.size as f64 * (l - mean).powi(2))
                .sum::<f64>()
                / total;
            let se = if n_folds > 1.0 {
                (var / (n_folds - 1.0)).sqrt()
            } else {
                0.0
            };
            loss_g.push(mean);
            se_g.push(se);
            excl_g.push(!fits[g].converged[k] || kept.iter().any(|o| !o.converged[g][k]));
            detail_g.push(per_fold);
        }
        cv_loss.push(loss_g);
        cv_se.push(se_g);
        excluded.push(excl_g);
        fold_losses.push(detail_g);
    }

    let mut result = CvResult {
        family: dataset.family,
        gammas: gammas.to_vec(),
        lambdas: grids,
        cv_loss,
        cv_se,
        excluded,
        fold_losses,
        fold_index,
        dropped_folds,
        folds,
        seed: cv.seed,
        chosen: Choice::default(),
    };
    result.chosen = select_rule(&result, SelectionRule::Min)?;
    Ok(CvFit {
        cv: result,
        design,
        penalties,
        fits,
    })
}

pub fn cross_validate(
    dataset: &Dataset,
    expansion: ExpansionSpec,
    penalty: &PenaltyScheme,
    gammas: &[f64],
    cv: &CvSpec,
    config: &SolverConfig,
) -> Result<CvResult> {
    Ok(cross_validate_full(dataset, expansion, penalty, gammas, cv, config)?.cv)
}
