//! Group-derived penalty weights.
//!
//! Every group k carries one weight w_k and the solver penalizes each of its
//! coefficients by `lambda * w_k * |beta|`. The sparsity-ranked weights are
//! `w_k = p_k^gamma`, which makes the prior information of group k equal to
//! `p_k^(1 - 2 gamma) / lambda^2`; at gamma = 0.5 every group contributes the
//! same information and at gamma = 0 the ordinary lasso is recovered.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::GroupedDesign;
use crate::error::{invalid, Result, SrlError};

pub const DEFAULT_SRL_GAMMA: f64 = 0.5;
pub const DEFAULT_CUMULATIVE_GAMMAS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Lasso,
    Srl,
    Cumulative,
    Custom,
}

impl FromStr for Scheme {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasso" => Ok(Scheme::Lasso),
            "srl" => Ok(Scheme::Srl),
            "cumulative" => Ok(Scheme::Cumulative),
            "custom" => Ok(Scheme::Custom),
            other => invalid(format!("unknown penalty scheme '{other}'")),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Lasso => "lasso",
            Scheme::Srl => "srl",
            Scheme::Cumulative => "cumulative",
            Scheme::Custom => "custom",
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return invalid(format!("gamma must be finite and nonnegative, got {gamma}"));
    }
    Ok(())
}

/// `w_k = p_k^gamma`.
pub fn srl_weights(group_sizes: &[usize], gamma: f64) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    if group_sizes.is_empty() {
        return invalid("no groups");
    }
    if let Some(k) = group_sizes.iter().position(|&p| p == 0) {
        return invalid(format!("group {} is empty", k + 1));
    }
    Ok(group_sizes
        .iter()
        .map(|&p| (p as f64).powf(gamma))
        .collect())
}

/// `w_k = (p_1 + ... + p_k)^gamma`, groups in increasing index order.
pub fn cumulative_weights(group_sizes: &[usize], gamma: f64) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    if group_sizes.is_empty() {
        return invalid("no groups");
    }
    let mut total = 0usize;
    group_sizes
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            total += p;
            if total == 0 {
                return invalid(format!("groups 1..={} are all empty", k + 1));
            }
            Ok((total as f64).powf(gamma))
        })
        .collect()
}

/// Prior Fisher information contributed by each group at penalty `lambda`.
///
/// For the sparsity-ranked scheme this is `p_k^(1 - 2 gamma) / lambda^2`. For
/// the cumulative scheme it is reported as `p_k / (lambda w_k)^2`, the
/// information implied by the weights actually applied.
pub fn prior_information(
    group_sizes: &[usize],
    gamma: f64,
    lambda: f64,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    let l2 = lambda * lambda;
    match scheme {
        Scheme::Lasso => prior_information(group_sizes, 0.0, lambda, Scheme::Srl),
        Scheme::Srl => {
            check_gamma(gamma)?;
            if group_sizes.is_empty() {
                return invalid("no groups");
            }
            Ok(group_sizes
                .iter()
                .map(|&p| (p as f64).powf(1.0 - 2.0 * gamma) / l2)
                .collect())
        }
        Scheme::Cumulative => {
            let w = cumulative_weights(group_sizes, gamma)?;
            Ok(information_from_weights(group_sizes, &w, lambda))
        }
        Scheme::Custom => {
            invalid("custom scheme needs explicit weights; use PenaltySpec::prior_information")
        }
    }
}

fn information_from_weights(group_sizes: &[usize], weights: &[f64], lambda: f64) -> Vec<f64> {
    group_sizes
        .iter()
        .zip(weights)
        .map(|(&p, &w)| p as f64 / (lambda * w).powi(2))
        .collect()
}

/// Penalty scheme with its resolved per-group weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub scheme: Scheme,
    pub gamma: f64,
    pub group_sizes: Vec<usize>,
    /// One weight per group; `f64::INFINITY` excludes the group entirely.
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_weights: Option<Vec<f64>>,
}

impl PenaltySpec {
    pub fn lasso(group_sizes: &[usize]) -> Self {
        Self {
            scheme: Scheme::Lasso,
            gamma: 0.0,
            group_sizes: group_sizes.to_vec(),
            weights: vec![1.0; group_sizes.len()],
            custom_weights: None,
        }
    }

    /// Empty groups receive weight 1; they have no columns to penalize.
    pub fn srl(group_sizes: &[usize], gamma: f64) -> Result<Self> {
        let nonempty: Vec<usize> = group_sizes.iter().copied().filter(|&p| p > 0).collect();
        let mut w = srl_weights(&nonempty, gamma)?.into_iter();
        let weights = group_sizes
            .iter()
            .map(|&p| if p > 0 { w.next().unwrap() } else { 1.0 })
            .collect();
        Ok(Self {
            scheme: Scheme::Srl,
            gamma,
            group_sizes: group_sizes.to_vec(),
            weights,
            custom_weights: None,
        })
    }

    pub fn cumulative(group_sizes: &[usize], gamma: f64) -> Result<Self> {
        Ok(Self {
            scheme: Scheme::Cumulative,
            gamma,
            group_sizes: group_sizes.to_vec(),
            weights: cumulative_weights(group_sizes, gamma)?,
            custom_weights: None,
        })
    }

    /// Explicit per-group weights; each must be positive (infinity allowed).
    pub fn custom(group_sizes: &[usize], weights: &[f64]) -> Result<Self> {
        if weights.len() != group_sizes.len() {
            return Err(SrlError::DimensionMismatch {
                expected: group_sizes.len(),
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return invalid(format!("penalty weights must be positive, got {w}"));
        }
        Ok(Self {
            scheme: Scheme::Custom,
            gamma: f64::NAN,
            group_sizes: group_sizes.to_vec(),
            weights: weights.to_vec(),
            custom_weights: Some(weights.to_vec()),
        })
    }

    /// Build the spec for `design`'s group sizes.
    pub fn for_design(
        design: &GroupedDesign,
        scheme: Scheme,
        gamma: f64,
        custom: Option<&[f64]>,
    ) -> Result<Self> {
        let sizes = design.group_sizes();
        match scheme {
            Scheme::Lasso => Ok(Self::lasso(&sizes)),
            Scheme::Srl => Self::srl(&sizes, gamma),
            Scheme::Cumulative => Self::cumulative(&sizes, gamma),
            Scheme::Custom => match custom {
                Some(w) => Self::custom(&sizes, w),
                None => invalid("custom scheme requires weights"),
            },
        }
    }

    pub fn n_groups(&self) -> usize {
        self.weights.len()
    }

    /// Weight of every design column.
    pub fn column_weights(&self, design: &GroupedDesign) -> Result<Vec<f64>> {
        if design.groups.len() != self.n_groups() {
            return Err(SrlError::DimensionMismatch {
                expected: design.groups.len(),
                found: self.n_groups(),
            });
        }
        Ok(design
            .column_group
            .iter()
            .map(|&g| self.weights[g])
            .collect())
    }

    /// Prior information `p_k / (lambda w_k)^2` for every group.
    pub fn prior_information(&self, lambda: f64) -> Result<Vec<f64>> {
        match self.scheme {
            Scheme::Custom => {
                if !(lambda > 0.0) {
                    return invalid(format!("lambda must be positive, got {lambda}"));
                }
                Ok(information_from_weights(
                    &self.group_sizes,
                    &self.weights,
                    lambda,
                ))
            }
            Scheme::Srl => prior_information(
                &self
                    .group_sizes
                    .iter()
                    .map(|&p| p.max(1))
                    .collect::<Vec<_>>(),
                self.gamma,
                lambda,
                Scheme::Srl,
            ),
            scheme => prior_information(&self.group_sizes, self.gamma, lambda, scheme),
        }
    }

    /// Per-group summary for reports: id, size, weight and information at `lambda`.
    pub fn report(&self, lambda: f64) -> Result<Vec<GroupPenalty>> {
        let info = self.prior_information(lambda)?;
        Ok(self
            .group_sizes
            .iter()
            .zip(&self.weights)
            .zip(info)
            .enumerate()
            .map(|(k, ((&size, &weight), information))| GroupPenalty {
                id: k + 1,
                size,
                weight: weight.is_finite().then_some(weight),
                information,
            })
            .collect())
    }
}

/// Serialized penalty row; an excluded group has `weight: null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPenalty {
    pub id: usize,
    pub size: usize,
    pub weight: Option<f64>,
    pub information: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn srl_examples() {
        let w = srl_weights(&[10, 100], 0.5).unwrap();
        assert_abs_diff_eq!(w[0], 3.1622776601683795, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 10.0, epsilon = 1e-12);
        assert_eq!(srl_weights(&[10, 100], 0.0).unwrap(), vec![1.0, 1.0]);
        let w = srl_weights(&[11, 22283], 0.5).unwrap();
        assert_abs_diff_eq!(w[1] / w[0], 45.008, epsilon = 1e-3);
        assert!(srl_weights(&[], 0.5).is_err());
        assert!(srl_weights(&[3, 0], 0.5).is_err());
        assert!(srl_weights(&[3], -1.0).is_err());
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(
            cumulative_weights(&[1, 1, 1, 1], 1.0).unwrap(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
        let w = cumulative_weights(&[1, 1], 0.5).unwrap();
        assert_abs_diff_eq!(w[1], std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_eq!(cumulative_weights(&[4, 9, 2], 0.0).unwrap(), vec![1.0; 3]);
        assert!(cumulative_weights(&[], 1.0).is_err());
    }

    #[test]
    fn information_examples() {
        assert_eq!(
            prior_information(&[10, 100], 0.0, 1.0, Scheme::Srl).unwrap(),
            vec![10.0, 100.0]
        );
        assert_eq!(
            prior_information(&[10, 100], 0.5, 2.0, Scheme::Srl).unwrap(),
            vec![0.25, 0.25]
        );
        assert_eq!(
            prior_information(&[7], 0.5, 1.0, Scheme::Srl).unwrap(),
            vec![1.0]
        );
        assert!(prior_information(&[7], 0.5, 0.0, Scheme::Srl).is_err());
        assert!(prior_information(&[7], 0.5, -1.0, Scheme::Srl).is_err());
        // cumulative: p_k / (lambda^2 (sum_{i<=k} p_i)^{2 gamma})
        let info = prior_information(&[2, 6], 0.5, 1.0, Scheme::Cumulative).unwrap();
        assert_abs_diff_eq!(info[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(info[1], 6.0 / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn spec_constructors() {
        let s = PenaltySpec::srl(&[1, 0], 0.5).unwrap();
        assert_eq!(s.weights, vec![1.0, 1.0]);
        assert!(PenaltySpec::custom(&[2, 3], &[1.0, 0.0]).is_err());
        assert!(PenaltySpec::custom(&[2, 3], &[1.0]).is_err());
        let c = PenaltySpec::custom(&[2, 3], &[1.0, f64::INFINITY]).unwrap();
        let report = c.report(1.0).unwrap();
        assert_eq!(report[1].weight, None);
        assert_eq!(report[1].information, 0.0);
        assert_eq!(PenaltySpec::lasso(&[3, 4]).weights, vec![1.0, 1.0]);
    }

    #[test]
    fn scheme_parsing() {
        for s in ["lasso", "srl", "cumulative", "custom"] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
        assert!("ridge".parse::<Scheme>().is_err());
    }

    proptest! {
        #[test]
        fn equal_information_at_half(sizes in prop::collection::vec(1usize..5000, 1..8), lambda in 0.01f64..50.0) {
            let info = prior_information(&sizes, 0.5, lambda, Scheme::Srl).unwrap();
            prop_assert!(info.iter().all(|&i| i == info[0]));
        }

        #[test]
        fn srl_monotone_in_size(a in 1usize..1000, b in 1usize..1000, gamma in 0.01f64..4.0) {
            let w = srl_weights(&[a, b], gamma).unwrap();
            if a < b { prop_assert!(w[0] < w[1]); }
            if a == b { prop_assert_eq!(w[0], w[1]); }
            let flat = srl_weights(&[a, b], 0.0).unwrap();
            prop_assert_eq!(flat, vec![1.0, 1.0]);
        }

        #[test]
        fn cumulative_nondecreasing(sizes in prop::collection::vec(1usize..100, 1..10), gamma in 0.0f64..8.0) {
            let w = cumulative_weights(&sizes, gamma).unwrap();
            prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        }
    }
}
