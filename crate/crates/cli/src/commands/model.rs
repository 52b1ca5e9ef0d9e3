//! Configuration shared by `fit` and `cv`: data, expansion, penalty, solver.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use srl_core::penalty::{DEFAULT_CUMULATIVE_GAMMAS, DEFAULT_SRL_GAMMA};
use srl_core::tuning::PenaltyScheme;
use srl_core::{load_dataset, Dataset, ExpansionSpec, Family, GroupedDesign, Scheme, SolverConfig};

use crate::args::ModelArgs;
use crate::config::{to_value, usage, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub data: Option<PathBuf>,
    pub response: String,
    pub family: Family,
    pub expand: String,
    pub scheme: Scheme,
    /// Gamma grid; `None` takes the scheme default (0.5 for srl, the
    /// standard grid for cumulative). Must be absent for lasso and custom.
    pub gamma: Option<Vec<f64>>,
    /// One weight per group, custom scheme only.
    pub weights: Option<Vec<Weight>>,
    pub solver: SolverConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            data: None,
            response: "y".into(),
            family: Family::Gaussian,
            expand: "none".into(),
            scheme: Scheme::Srl,
            gamma: None,
            weights: None,
            solver: SolverConfig::default(),
        }
    }
}

/// Flag overrides in config-file shape.
pub fn model_flags(m: &ModelArgs) -> Vec<(&'static str, Option<Value>)> {
    let mut solver = serde_json::Map::new();
    if let Some(n) = m.n_lambda {
        solver.insert("n_lambda".into(), to_value(n));
    }
    if let Some(r) = m.lambda_min_ratio {
        solver.insert("lambda_min_ratio".into(), to_value(r));
    }
    vec![
        ("data", m.data.as_ref().map(to_value)),
        ("response", m.response.as_ref().map(to_value)),
        ("family", m.family.map(to_value)),
        ("expand", m.expand.map(|e| to_value(e.to_string()))),
        ("scheme", m.scheme.map(to_value)),
        ("gamma", m.gamma.as_ref().map(to_value)),
        (
            "weights",
            m.weights
                .as_ref()
                .map(|w| to_value(w.iter().map(|&v| Weight(v)).collect::<Vec<_>>())),
        ),
        (
            "solver",
            (!solver.is_empty()).then_some(Value::Object(solver)),
        ),
    ]
}

/// Validated model settings ready for fitting.
pub struct Model {
    pub dataset: Dataset,
    pub expansion: ExpansionSpec,
    pub penalty: PenaltyScheme,
    pub gammas: Vec<f64>,
}

impl ModelConfig {
    pub fn expansion(&self) -> Result<ExpansionSpec> {
        match self.expand.parse() {
            Ok(e) => Ok(e),
            Err(e) => usage(format!("--expand: {e}")),
        }
    }

    /// Check flag combinations and return the gamma grid to fit.
    pub fn gammas(&self) -> Result<Vec<f64>> {
        if self.weights.is_some() && self.scheme != Scheme::Custom {
            return usage("--weights requires --scheme custom");
        }
        let gammas = match (self.scheme, &self.gamma) {
            (Scheme::Lasso, Some(_)) => {
                return usage("--gamma cannot be combined with --scheme lasso")
            }
            (Scheme::Custom, Some(_)) => {
                return usage("--gamma cannot be combined with --scheme custom")
            }
            (Scheme::Lasso, None) => vec![0.0],
            (Scheme::Custom, None) => {
                if self.weights.is_none() {
                    return usage("--scheme custom requires --weights");
                }
                vec![f64::NAN]
            }
            (Scheme::Srl, None) => vec![DEFAULT_SRL_GAMMA],
            (Scheme::Cumulative, None) => DEFAULT_CUMULATIVE_GAMMAS.to_vec(),
            (_, Some(g)) => g.clone(),
        };
        if gammas.is_empty() {
            return usage("--gamma needs at least one value");
        }
        if self.scheme != Scheme::Custom {
            if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
                return usage(format!("gamma must be finite and nonnegative, got {g}"));
            }
        }
        if let Err(e) = self.solver.validate() {
            return usage(e.to_string());
        }
        Ok(gammas)
    }

    pub fn penalty_scheme(&self) -> PenaltyScheme {
        match &self.weights {
            Some(w) => PenaltyScheme::custom(w.iter().map(|w| w.0).collect()),
            None => PenaltyScheme::new(self.scheme),
        }
    }

    /// Validate, then load the data.
    pub fn load(&self) -> Result<Model> {
        let expansion = self.expansion()?;
        let gammas = self.gammas()?;
        let Some(path) = &self.data else {
            return usage("--data is required");
        };
        let dataset = load_dataset(path, &self.response, self.family)
            .with_context(|| format!("loading {}", path.display()))?;
        Ok(Model {
            dataset,
            expansion,
            penalty: self.penalty_scheme(),
            gammas,
        })
    }
}

/// The custom weight count is only known once the design is built.
pub fn check_weight_count(penalty: &PenaltyScheme, design: &GroupedDesign) -> Result<()> {
    if let Some(w) = &penalty.custom_weights {
        if w.len() != design.groups.len() {
            return usage(format!(
                "--weights has {} values but the design has {} groups",
                w.len(),
                design.groups.len()
            ));
        }
    }
    Ok(())
}
