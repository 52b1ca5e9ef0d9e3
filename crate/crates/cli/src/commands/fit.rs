use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use srl_core::data::destandardize;
use srl_core::expand::expand;
use srl_core::penalty::GroupPenalty;
use srl_core::simulate::write_csv;
use srl_core::solver::{fit_path, FitPathRecord};
use srl_core::tuning::{
    cross_validate_full, information_criterion, select_by_ic, select_rule, Criterion, CvSpec,
    SelectionRule,
};
use srl_core::{FitPath, GroupedDesign, PenaltySpec, Scheme, StandardizationParams};

use super::model::{check_weight_count, model_flags, Model, ModelConfig};
use crate::args::FitArgs;
use crate::config::{flags, load_config_file, resolve, to_value, usage, Run, Selection};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub select: Selection,
    pub rule: SelectionRule,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            select: Selection::Cv {
                folds: 10,
                repeats: 1,
            },
            rule: SelectionRule::Min,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub id: usize,
    pub label: String,
    pub size: usize,
    /// `null` for an excluded (infinite-weight) group.
    pub weight: Option<f64>,
    /// Prior information at the selected lambda.
    pub information: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub method: String,
    pub rule: Option<SelectionRule>,
    pub gamma_index: usize,
    pub lambda_index: usize,
    pub gamma: Option<f64>,
    pub lambda: f64,
    /// Cross-validated loss or information-criterion value at the choice.
    pub criterion_value: f64,
    /// Criterion value along the chosen path (information criteria only).
    pub criterion_path: Option<Vec<Option<f64>>>,
    pub df: usize,
    pub support: Vec<String>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub family: srl_core::Family,
    pub expansion: String,
    pub scheme: Scheme,
    pub response: String,
    pub feature_names: Vec<String>,
    pub column_names: Vec<String>,
    pub column_groups: Vec<usize>,
    pub groups: Vec<GroupReport>,
    pub standardization: StandardizationParams,
    pub selection: SelectionReport,
    pub path: FitPathRecord,
}

#[derive(Debug, Clone, Serialize)]
struct CoefficientRow<'a> {
    term: &'a str,
    group: Option<usize>,
    coefficient: f64,
    coefficient_std: f64,
}

pub struct Selected {
    pub penalty: PenaltySpec,
    pub fit: FitPath,
    pub report: SelectionReport,
}

fn choose(model: &Model, design: &GroupedDesign, config: &FitConfig) -> Result<Selected> {
    let solver = &config.model.solver;
    let gamma_of = |p: &PenaltySpec| (p.scheme != Scheme::Custom).then_some(p.gamma);
    match config.select {
        Selection::Cv { folds, repeats } => {
            if folds < 2 || folds > model.dataset.n() || repeats < 1 {
                return usage(format!(
                    "--select cv:{folds}:{repeats} needs 2 <= k <= n and r >= 1"
                ));
            }
            let spec = CvSpec {
                folds,
                repeats,
                seed: config.seed,
            };
            let mut cvfit = cross_validate_full(
                &model.dataset,
                model.expansion,
                &model.penalty,
                &model.gammas,
                &spec,
                solver,
            )?;
            cvfit.cv.chosen = select_rule(&cvfit.cv, config.rule)?;
            let c = cvfit.cv.chosen;
            let fit = cvfit.fits.swap_remove(c.gamma_index);
            let penalty = cvfit.penalties.swap_remove(c.gamma_index);
            let report = SelectionReport {
                method: config.select.to_string(),
                rule: Some(config.rule),
                gamma_index: c.gamma_index,
                lambda_index: c.lambda_index,
                gamma: gamma_of(&penalty),
                lambda: c.lambda,
                criterion_value: c.loss,
                criterion_path: None,
                df: fit.df[c.lambda_index],
                support: Vec::new(),
                converged: fit.converged[c.lambda_index],
            };
            Ok(Selected {
                penalty,
                fit,
                report,
            })
        }
        Selection::Bic | Selection::Aic => {
            let criterion = if config.select == Selection::Bic {
                Criterion::Bic
            } else {
                Criterion::Aic
            };
            let y = model.dataset.y.to_vec();
            let mut penalties = Vec::new();
            let mut fits = Vec::new();
            for &g in &model.gammas {
                let spec = model.penalty.resolve(design, g)?;
                fits.push(fit_path(design, &y, &spec, model.dataset.family, solver)?);
                penalties.push(spec);
            }
            let (g, k, value) = select_by_ic(&fits, model.dataset.n(), criterion)?;
            let ic = information_criterion(&fits[g], model.dataset.n(), criterion)?;
            let fit = fits.swap_remove(g);
            let penalty = penalties.swap_remove(g);
            let report = SelectionReport {
                method: config.select.to_string(),
                rule: None,
                gamma_index: g,
                lambda_index: k,
                gamma: gamma_of(&penalty),
                lambda: fit.lambdas[k],
                criterion_value: value,
                criterion_path: Some(ic.values),
                df: fit.df[k],
                support: Vec::new(),
                converged: fit.converged[k],
            };
            Ok(Selected {
                penalty,
                fit,
                report,
            })
        }
    }
}

pub fn run(args: FitArgs) -> Result<()> {
    let file = args
        .common
        .config
        .as_deref()
        .map(|p| load_config_file(p, "fit"))
        .transpose()?;
    let mut entries = model_flags(&args.model);
    entries.extend([
        ("select", args.select.map(to_value)),
        ("rule", args.rule.map(to_value)),
        ("seed", args.common.seed.map(to_value)),
    ]);
    let config: FitConfig = resolve(&FitConfig::default(), file, flags(entries))?;
    if config.rule != SelectionRule::Min && !matches!(config.select, Selection::Cv { .. }) {
        return usage("--rule applies to cv selection only");
    }
    let model = config.model.load()?;
    let design = expand(
        model.dataset.x.view(),
        &model.dataset.feature_names,
        model.expansion,
    )?;
    check_weight_count(&model.penalty, &design)?;
    let out = args.common.out.unwrap_or_else(|| PathBuf::from("."));
    let mut run = Run::start("fit", &out)?;

    let mut selected = choose(&model, &design, &config)?;
    let k = selected.report.lambda_index;
    let support = selected.fit.support(k);
    selected.report.support = support
        .iter()
        .map(|&j| design.column_names[j].clone())
        .collect();
    log::info!(
        "selected lambda {:.4e} (index {k}) with {} nonzero terms",
        selected.report.lambda,
        support.len()
    );

    let info: Vec<GroupPenalty> = selected.penalty.report(selected.fit.lambdas[k])?;
    let groups = design
        .groups
        .iter()
        .zip(info)
        .map(|(g, p)| GroupReport {
            id: g.id,
            label: g.label.clone(),
            size: p.size,
            weight: p.weight,
            information: p.information,
        })
        .collect();
    let model_file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        family: model.dataset.family,
        expansion: model.expansion.to_string(),
        scheme: selected.penalty.scheme,
        response: config.model.response.clone(),
        feature_names: design.feature_names.clone(),
        column_names: design.column_names.clone(),
        column_groups: design.column_group.iter().map(|g| g + 1).collect(),
        groups,
        standardization: design.standardization.clone(),
        selection: selected.report,
        path: selected.fit.to_record(),
    };
    run.write_json("model.json", &model_file)?;

    let beta_std = &selected.fit.betas[k];
    let (beta_raw, intercept) = destandardize(
        beta_std,
        selected.fit.intercepts[k],
        &design.standardization,
    )?;
    let mut rows = vec![CoefficientRow {
        term: "(intercept)",
        group: None,
        coefficient: intercept,
        coefficient_std: selected.fit.intercepts[k],
    }];
    rows.extend(
        design
            .column_names
            .iter()
            .enumerate()
            .map(|(j, name)| CoefficientRow {
                term: name,
                group: Some(design.column_group[j] + 1),
                coefficient: beta_raw[j],
                coefficient_std: beta_std[j],
            }),
    );
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    run.write("coefficients.csv", &buf)?;
    run.finish(Some(config.seed), to_value(&config))
}
