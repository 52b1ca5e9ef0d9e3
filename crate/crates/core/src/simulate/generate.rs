//! Data generators for the interaction and polynomial experiments.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{ColumnMeta, Dataset, Family, GroupedDesign};
use crate::error::{invalid, Result, SrlError};
use crate::expand::{choose2, classify_interaction, HierarchyClass};

/// Total absolute magnitude of the main-effect coefficients.
pub const MAIN_MAGNITUDE: f64 = 10.0;

/// Total absolute magnitude of the interaction coefficients: `10 sqrt(12/7)`,
/// the ratio of the sd of a U(0,1) variable to that of a product of two.
pub fn inter_magnitude() -> f64 {
    10.0 * (12.0f64 / 7.0).sqrt()
}

fn scaled_normals<R: Rng + ?Sized>(k: usize, total: f64, rng: &mut R) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let draws: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
    let sum: f64 = draws.iter().map(|d: &f64| d.abs()).sum();
    draws.into_iter().map(|d| total * d / sum).collect()
}

/// `s` coefficients `10 theta_j / sum |theta_i|` with `theta ~ N(0, 1)`.
pub fn gen_beta_main<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Vec<f64> {
    scaled_normals(s, MAIN_MAGNITUDE, rng)
}

/// `b` coefficients `10 sqrt(12/7) phi_j / sum |phi_i|` with `phi ~ N(0, 1)`.
pub fn gen_beta_inter<R: Rng + ?Sized>(b: usize, rng: &mut R) -> Vec<f64> {
    scaled_normals(b, inter_magnitude(), rng)
}

/// All pairs `(j, l)`, `j < l < p`, split into strong / weak / non bins.
pub fn hierarchy_bins(p: usize, active_mains: &[usize]) -> [Vec<(usize, usize)>; 3] {
    let mut bins: [Vec<(usize, usize)>; 3] = Default::default();
    for j in 0..p {
        for l in j + 1..p {
            let b = match classify_interaction((j, l), active_mains) {
                HierarchyClass::Strong => 0,
                HierarchyClass::Weak => 1,
                HierarchyClass::Non => 2,
            };
            bins[b].push((j, l));
        }
    }
    bins
}

/// Draw `b` distinct pairs: each draw first picks a hierarchy bin with
/// probabilities `probs` (renormalized over bins that still have pairs),
/// then a pair uniformly from that bin without replacement.
pub fn sample_active_interactions<R: Rng + ?Sized>(
    p: usize,
    active_mains: &[usize],
    b: usize,
    probs: [f64; 3],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if b as u64 > choose2(p as u64) {
        return invalid(format!(
            "{b} interactions requested but only {} pairs exist",
            choose2(p as u64)
        ));
    }
    if probs.iter().any(|q| !(*q >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return invalid("hierarchy probabilities must be nonnegative and sum to 1");
    }
    let mut bins = hierarchy_bins(p, active_mains);
    let mut out = Vec::with_capacity(b);
    for _ in 0..b {
        let mass: Vec<f64> = (0..3)
            .map(|i| if bins[i].is_empty() { 0.0 } else { probs[i] })
            .collect();
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return invalid("every bin with positive probability is exhausted");
        }
        let u: f64 = rng.random::<f64>() * total;
        let mut bin = 0;
        let mut acc = mass[0];
        while u >= acc && bin < 2 {
            bin += 1;
            acc += mass[bin];
        }
        while bins[bin].is_empty() {
            bin -= 1;
        }
        let pick = rng.random_range(0..bins[bin].len());
        out.push(bins[bin].swap_remove(pick));
    }
    Ok(out)
}

/// Generating model of one interaction replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionTruth {
    pub active_mains: Vec<usize>,
    pub main_coefs: Vec<f64>,
    pub active_pairs: Vec<(usize, usize)>,
    pub pair_coefs: Vec<f64>,
}

impl InteractionTruth {
    pub fn mean(&self, x: &Array2<f64>, i: usize) -> f64 {
        let main: f64 = self
            .active_mains
            .iter()
            .zip(&self.main_coefs)
            .map(|(&j, b)| b * x[[i, j]])
            .sum();
        let inter: f64 = self
            .active_pairs
            .iter()
            .zip(&self.pair_coefs)
            .map(|(&(j, l), b)| b * x[[i, j]] * x[[i, l]])
            .sum();
        main + inter
    }

    /// Design columns carrying a nonzero true coefficient.
    pub fn support(&self, design: &GroupedDesign) -> Vec<usize> {
        design
            .column_meta
            .iter()
            .enumerate()
            .filter(|(_, m)| match **m {
                ColumnMeta::Main { feature } => self.active_mains.contains(&feature),
                ColumnMeta::Interaction { first, second } => {
                    self.active_pairs.contains(&(first, second))
                }
                ColumnMeta::Polynomial { .. } => false,
            })
            .map(|(j, _)| j)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterSimConfig {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub b: usize,
    pub hierarchy_probs: [f64; 3],
    pub noise_sd: f64,
    pub n_test: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for InterSimConfig {
    fn default() -> Self {
        Self {
            n: 300,
            p: 20,
            s: 5,
            b: 0,
            hierarchy_probs: [0.7, 0.2, 0.1],
            noise_sd: 1.0,
            n_test: 10_000,
            replicates: 200,
            seed: 1,
        }
    }
}

impl InterSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 || self.s > self.p {
            return invalid(format!("need 1 <= s <= p, got s={} p={}", self.s, self.p));
        }
        if self.b as u64 > choose2(self.p as u64) {
            return invalid(format!("b={} exceeds C(p,2)", self.b));
        }
        if (self.hierarchy_probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return invalid("hierarchy probabilities must sum to 1");
        }
        if self.n < 2 || self.n_test < 1 {
            return invalid("need n >= 2 and n_test >= 1");
        }
        if !(self.noise_sd >= 0.0) {
            return invalid("noise_sd must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct InteractionData {
    pub train: Dataset,
    pub test: Dataset,
    pub truth: InteractionTruth,
}

fn uniform_matrix<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, p), || rng.random::<f64>())
}

/// `X ~ U(0,1)` iid, `y = [X, X.X] beta + N(0, noise_sd^2)`.
pub fn gen_interaction_data<R: Rng + ?Sized>(
    config: &InterSimConfig,
    rng: &mut R,
) -> Result<InteractionData> {
    config.validate()?;
    let mut active_mains = index::sample(rng, config.p, config.s).into_vec();
    active_mains.sort_unstable();
    let main_coefs = gen_beta_main(config.s, rng);
    let pair_coefs = gen_beta_inter(config.b, rng);
    let active_pairs = sample_active_interactions(
        config.p,
        &active_mains,
        config.b,
        config.hierarchy_probs,
        rng,
    )?;
    let truth = InteractionTruth {
        active_mains,
        main_coefs,
        active_pairs,
        pair_coefs,
    };
    let noise =
        Normal::new(0.0, config.noise_sd).map_err(|e| SrlError::InvalidInput(e.to_string()))?;
    let draw = |n: usize, rng: &mut R| -> Result<Dataset> {
        let x = uniform_matrix(n, config.p, rng);
        let y = Array1::from_iter((0..n).map(|i| truth.mean(&x, i) + noise.sample(rng)));
        Dataset::with_default_names(y, x, Family::Gaussian)
    };
    let train = draw(config.n, rng)?;
    let test = draw(config.n_test, rng)?;
    Ok(InteractionData { train, test, truth })
}

/// True mean function of the polynomial experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyTruth {
    /// `f(x) = 10 (x - 0.5)^2`.
    QuadraticFixed,
    /// Degrees 1..=10 with random coefficients of total magnitude 10.
    RandomOrder10,
    /// Degrees 1 and 2 with random coefficients of total magnitude 10.
    RandomQuadratic,
    /// `f(x) = 10 x`.
    Linear,
    /// `f(x) = 0`.
    Null,
}

impl PolyTruth {
    pub fn name(&self) -> &'static str {
        match self {
            PolyTruth::QuadraticFixed => "quadratic_fixed",
            PolyTruth::RandomOrder10 => "random_order_10",
            PolyTruth::RandomQuadratic => "random_quadratic",
            PolyTruth::Linear => "linear",
            PolyTruth::Null => "null",
        }
    }

    /// Degree of the true polynomial.
    pub fn order(&self) -> u32 {
        match self {
            PolyTruth::QuadraticFixed | PolyTruth::RandomQuadratic => 2,
            PolyTruth::RandomOrder10 => 10,
            PolyTruth::Linear => 1,
            PolyTruth::Null => 0,
        }
    }

    /// Residual sd used by each study.
    pub fn default_noise_sd(&self) -> f64 {
        match self {
            PolyTruth::QuadraticFixed => 0.9,
            _ => 1.0,
        }
    }
}

impl FromStr for PolyTruth {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "quadratic_fixed" => Self::QuadraticFixed,
            "random_order_10" => Self::RandomOrder10,
            "random_quadratic" => Self::RandomQuadratic,
            "linear" => Self::Linear,
            "null" => Self::Null,
            other => return invalid(format!("unknown polynomial truth '{other}'")),
        })
    }
}

impl fmt::Display for PolyTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `f(x) = intercept + sum_d coefs[d-1] x^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub intercept: f64,
    pub coefs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefs.iter().rev().fold(0.0, |acc, c| (acc + c) * x) + self.intercept
    }

    /// Degrees (1-based) with a nonzero coefficient.
    pub fn support(&self) -> Vec<u32> {
        self.coefs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(d, _)| d as u32 + 1)
            .collect()
    }
}

pub fn poly_truth<R: Rng + ?Sized>(truth: PolyTruth, rng: &mut R) -> Polynomial {
    match truth {
        PolyTruth::QuadraticFixed => Polynomial {
            intercept: 2.5,
            coefs: vec![-10.0, 10.0],
        },
        PolyTruth::RandomOrder10 => Polynomial {
            intercept: 0.0,
            coefs: scaled_normals(10, MAIN_MAGNITUDE, rng),
        },
        PolyTruth::RandomQuadratic => Polynomial {
            intercept: 0.0,
            coefs: scaled_normals(2, MAIN_MAGNITUDE, rng),
        },
        PolyTruth::Linear => Polynomial {
            intercept: 0.0,
            coefs: vec![10.0],
        },
        PolyTruth::Null => Polynomial {
            intercept: 0.0,
            coefs: vec![],
        },
    }
}

/// One univariate sample: `x ~ U(0,1)`, `y = f(x) + N(0, noise_sd^2)`.
pub fn gen_poly_data<R: Rng + ?Sized>(
    truth: PolyTruth,
    n: usize,
    noise_sd: f64,
    rng: &mut R,
) -> Result<(Dataset, Polynomial)> {
    let f = poly_truth(truth, rng);
    let noise = Normal::new(0.0, noise_sd).map_err(|e| SrlError::InvalidInput(e.to_string()))?;
    let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let y = Array1::from_iter(x.iter().map(|&v| f.eval(v) + noise.sample(rng)));
    let x = Array2::from_shape_vec((n, 1), x).expect("n x 1");
    Ok((Dataset::new(y, x, vec!["x".into()], Family::Gaussian)?, f))
}
