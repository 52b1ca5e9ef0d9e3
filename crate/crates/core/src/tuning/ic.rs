use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Family;
use crate::error::{invalid, Result, SrlError};
use crate::solver::FitPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bic,
    Aic,
}

impl FromStr for Criterion {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bic" => Ok(Self::Bic),
            "aic" => Ok(Self::Aic),
            other => invalid(format!("unknown criterion '{other}'")),
        }
    }
}

/// Criterion value per grid point; `None` where the fit did not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcResult {
    pub criterion: Criterion,
    pub values: Vec<Option<f64>>,
    pub chosen: usize,
}

impl IcResult {
    pub fn chosen_value(&self) -> f64 {
        self.values[self.chosen].expect("chosen point is converged")
    }
}

/// `deviance + penalty * df`, with gaussian deviance `n log(RSS / n)` and
/// df the count of nonzero coefficients (intercept excluded).
pub fn information_criterion(fit: &FitPath, n: usize, criterion: Criterion) -> Result<IcResult> {
    let nf = n as f64;
    let per_df = match criterion {
        Criterion::Bic => nf.ln(),
        Criterion::Aic => 2.0,
    };
    let values: Vec<Option<f64>> = (0..fit.len())
        .map(|k| {
            fit.converged[k].then(|| {
                let dev = match fit.family {
                    Family::Gaussian => nf * (fit.deviance[k] / nf).ln(),
                    Family::Binomial => fit.deviance[k],
                };
                dev + per_df * fit.df[k] as f64
            })
        })
        .collect();
    let chosen = argmin(&values).ok_or(SrlError::NoConvergedFit)?;
    Ok(IcResult {
        criterion,
        values,
        chosen,
    })
}

fn argmin(values: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|b| *v < values[b].unwrap()) {
                best = Some(k);
            }
        }
    }
    best
}

/// Joint minimization over several paths (one per gamma). Returns
/// (path index, lambda index, value).
pub fn select_by_ic(
    fits: &[FitPath],
    n: usize,
    criterion: Criterion,
) -> Result<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (g, fit) in fits.iter().enumerate() {
        let Ok(ic) = information_criterion(fit, n, criterion) else {
            continue;
        };
        let v = ic.chosen_value();
        if best.is_none_or(|(_, _, b)| v < b) {
            best = Some((g, ic.chosen, v));
        }
    }
    best.ok_or(SrlError::NoConvergedFit)
}
