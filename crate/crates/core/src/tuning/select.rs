use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cv::CvResult;
use crate::error::{invalid, Result, SrlError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Global minimum of the cross-validated loss.
    Min,
    /// Largest lambda within one standard error of the minimum, at the minimizing gamma.
    OneSe,
}

impl FromStr for SelectionRule {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::Min),
            "one_se" | "1se" => Ok(Self::OneSe),
            other => invalid(format!("unknown selection rule '{other}'")),
        }
    }
}

/// A selected (gamma, lambda) grid point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub gamma_index: usize,
    pub lambda_index: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub loss: f64,
}

pub fn select_rule(cv: &CvResult, rule: SelectionRule) -> Result<Choice> {
    let mut best: Option<(usize, usize)> = None;
    for (g, losses) in cv.cv_loss.iter().enumerate() {
        for (k, &l) in losses.iter().enumerate() {
            if cv.excluded[g][k] || !l.is_finite() {
                continue;
            }
            if best.is_none_or(|(bg, bk)| l < cv.cv_loss[bg][bk]) {
                best = Some((g, k));
            }
        }
    }
    let (g, mut k) = best.ok_or(SrlError::NoConvergedFit)?;
    if rule == SelectionRule::OneSe {
        let threshold = cv.cv_loss[g][k] + cv.cv_se[g][k];
        k = (0..=k)
            .find(|&i| !cv.excluded[g][i] && cv.cv_loss[g][i] <= threshold)
            .unwrap_or(k);
    }
    Ok(Choice {
        gamma_index: g,
        lambda_index: k,
        gamma: cv.gammas[g],
        lambda: cv.lambdas[g][k],
        loss: cv.cv_loss[g][k],
    })
}
