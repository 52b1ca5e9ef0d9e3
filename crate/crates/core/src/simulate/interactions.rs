//! Interaction-selection experiment: LS0 / APL / SRL on uniform designs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_interaction_data, InterSimConfig, InteractionData};
use super::metrics::{evaluate_selection, rmse};
use super::table::SimRow;
use crate::error::{invalid, Result, SrlError};
use crate::expand::ExpansionSpec;
use crate::penalty::Scheme;
use crate::rng::{derive_seed, stream, tag};
use crate::solver::{predict, SolverConfig};
use crate::tuning::{cross_validate_full, CvSpec, PenaltyScheme};

pub const EXPERIMENT: &str = "interactions";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Framework {
    /// Main effects only (interaction weight infinite).
    #[serde(rename = "LS0")]
    Ls0,
    /// All-pairs lasso, every weight 1.
    #[serde(rename = "APL")]
    Apl,
    /// Sparsity-ranked lasso.
    #[serde(rename = "SRL")]
    Srl,
}

impl Framework {
    pub const ALL: [Framework; 3] = [Framework::Ls0, Framework::Apl, Framework::Srl];

    pub fn name(&self) -> &'static str {
        match self {
            Framework::Ls0 => "LS0",
            Framework::Apl => "APL",
            Framework::Srl => "SRL",
        }
    }
}

impl FromStr for Framework {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LS0" => Ok(Self::Ls0),
            "APL" => Ok(Self::Apl),
            "SRL" => Ok(Self::Srl),
            _ => invalid(format!("unknown framework '{s}' (expected LS0, APL, SRL)")),
        }
    }
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid floor for the interaction experiment. CV-chosen lambdas sit near
/// 2e-2 to 1e-1 of lambda_max here, and the near-saturated tail below
/// 1e-2 dominates the cost of every path.
pub const INTER_LAMBDA_MIN_RATIO: f64 = 1e-2;

/// Fitting options shared by every framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterFitOptions {
    pub frameworks: Vec<Framework>,
    pub cv_folds: usize,
    pub srl_gamma: f64,
    pub solver: SolverConfig,
}

impl Default for InterFitOptions {
    fn default() -> Self {
        Self {
            frameworks: Framework::ALL.to_vec(),
            cv_folds: 10,
            srl_gamma: 0.5,
            solver: SolverConfig {
                lambda_min_ratio: Some(INTER_LAMBDA_MIN_RATIO),
                ..SolverConfig::default()
            },
        }
    }
}

fn penalty_for(fw: Framework, gamma: f64) -> (PenaltyScheme, f64) {
    match fw {
        Framework::Ls0 => (PenaltyScheme::custom(vec![1.0, f64::INFINITY]), f64::NAN),
        Framework::Apl => (PenaltyScheme::new(Scheme::Lasso), 0.0),
        Framework::Srl => (PenaltyScheme::new(Scheme::Srl), gamma),
    }
}

fn setting(b: usize) -> String {
    format!("b={b}")
}

fn fit_framework(
    data: &InteractionData,
    fw: Framework,
    cv: &CvSpec,
    opts: &InterFitOptions,
    row: SimRow,
) -> Result<SimRow> {
    let (scheme, gamma) = penalty_for(fw, opts.srl_gamma);
    let cvfit = cross_validate_full(
        &data.train,
        ExpansionSpec::interactions(),
        &scheme,
        &[gamma],
        cv,
        &opts.solver,
    )?;
    let (_, fit, k) = cvfit.chosen_fit();
    if k + 1 == fit.len() {
        log::warn!(
            "{} replicate {}: {fw} chose the smallest lambda on the grid",
            row.setting,
            row.replicate
        );
    }
    let design = &cvfit.design;
    let pred = predict(fit, k, data.test.x.view(), design)?;
    let is_main: Vec<bool> = design.column_meta.iter().map(|m| m.is_main()).collect();
    let metrics = evaluate_selection(&fit.support(k), &data.truth.support(design), &is_main);
    let mut row = row.with_selection(&metrics);
    row.converged = fit.converged[k];
    row.gamma = gamma;
    row.lambda = fit.lambdas[k];
    row.rmse = rmse(data.test.y.as_slice().expect("contiguous"), &pred);
    Ok(row)
}

/// One replicate: fresh data and coefficients, then every framework on the
/// same folds.
pub fn run_interaction_replicate(
    config: &InterSimConfig,
    opts: &InterFitOptions,
    replicate: usize,
) -> Result<Vec<SimRow>> {
    let b = config.b as u64;
    let r = replicate as u64;
    let data = gen_interaction_data(config, &mut stream(config.seed, &[tag::DATA, b, r]))?;
    let cv = CvSpec {
        folds: opts.cv_folds,
        repeats: 1,
        seed: derive_seed(config.seed, &[tag::FOLDS, b, r]),
    };
    let set = setting(config.b);
    opts.frameworks
        .iter()
        .map(|&fw| {
            let row = SimRow::new(EXPERIMENT, &set, replicate, fw.name(), config.noise_sd);
            match fit_framework(&data, fw, &cv, opts, row.clone()) {
                Ok(r) => Ok(r),
                Err(SrlError::NoConvergedFit) => {
                    log::warn!("{set} replicate {replicate}: {fw} has no converged fit");
                    Ok(row)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// All replicates of one `b` setting, ordered by (replicate, framework).
pub fn run_interaction_experiment(
    config: &InterSimConfig,
    opts: &InterFitOptions,
) -> Result<Vec<SimRow>> {
    config.validate()?;
    opts.solver.validate()?;
    if opts.frameworks.is_empty() {
        return invalid("no frameworks requested");
    }
    let per_rep: Vec<Result<Vec<SimRow>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_interaction_replicate(config, opts, r))
        .collect();
    let mut rows = Vec::with_capacity(config.replicates * opts.frameworks.len());
    for r in per_rep {
        rows.extend(r?);
    }
    Ok(rows)
}
