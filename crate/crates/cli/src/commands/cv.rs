use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use srl_core::expand::expand;
use srl_core::tuning::{cross_validate, select_rule, CvSpec, SelectionRule};

use super::model::{check_weight_count, model_flags, ModelConfig};
use crate::args::CvArgs;
use crate::config::{flags, load_config_file, resolve, to_value, usage, Run};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub folds: usize,
    pub repeats: usize,
    pub rule: SelectionRule,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            folds: 10,
            repeats: 1,
            rule: SelectionRule::Min,
            seed: 1,
        }
    }
}

pub fn run(args: CvArgs) -> Result<()> {
    let file = args
        .common
        .config
        .as_deref()
        .map(|p| load_config_file(p, "cv"))
        .transpose()?;
    let mut entries = model_flags(&args.model);
    entries.extend([
        ("folds", args.folds.map(to_value)),
        ("repeats", args.repeats.map(to_value)),
        ("rule", args.rule.map(to_value)),
        ("seed", args.common.seed.map(to_value)),
    ]);
    let config: CvConfig = resolve(&CvConfig::default(), file, flags(entries))?;
    let model = config.model.load()?;
    if config.folds < 2 || config.folds > model.dataset.n() || config.repeats < 1 {
        return usage(format!(
            "need 2 <= folds <= n and repeats >= 1, got {} and {}",
            config.folds, config.repeats
        ));
    }
    let design = expand(
        model.dataset.x.view(),
        &model.dataset.feature_names,
        model.expansion,
    )?;
    check_weight_count(&model.penalty, &design)?;
    let out = args.common.out.unwrap_or_else(|| PathBuf::from("."));
    let mut run = Run::start("cv", &out)?;

    let spec = CvSpec {
        folds: config.folds,
        repeats: config.repeats,
        seed: config.seed,
    };
    let mut cv = cross_validate(
        &model.dataset,
        model.expansion,
        &model.penalty,
        &model.gammas,
        &spec,
        &config.model.solver,
    )?;
    cv.chosen = select_rule(&cv, config.rule)?;
    log::info!(
        "chose gamma {} lambda {:.4e} with cv loss {:.6}",
        cv.chosen.gamma,
        cv.chosen.lambda,
        cv.chosen.loss
    );
    run.write_json("cv.json", &cv)?;
    let mut buf = Vec::new();
    cv.write_loss_csv(&mut buf)?;
    run.write("cv_loss.csv", &buf)?;
    run.finish(Some(config.seed), to_value(&config))
}
