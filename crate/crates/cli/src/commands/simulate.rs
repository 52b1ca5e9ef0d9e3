use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use srl_core::simulate::interactions::EXPERIMENT as INTER_EXPERIMENT;
use srl_core::simulate::poly::EXPERIMENT as POLY_EXPERIMENT;
use srl_core::simulate::{
    run_interaction_experiment, run_poly_experiment, write_rows, Framework, InterFitOptions,
    InterSimConfig, PolySimConfig, PolyTruth, PolyTuning, SimRow, SimSummary,
};
use srl_core::SolverConfig;

use crate::args::{InterArgs, PolyArgs, SimulateCommand};
use crate::config::{flags, load_config_file, resolve, to_value, usage, Run, Selection};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Interaction experiment over one or more `b` settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterRunConfig {
    pub b: Vec<usize>,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    /// Probabilities of drawing an active interaction from the strong,
    /// weak-only and non-hierarchical bins.
    pub hierarchy_probs: [f64; 3],
    pub noise_sd: f64,
    pub n_test: usize,
    pub replicates: usize,
    pub seed: u64,
    pub folds: usize,
    pub frameworks: Vec<Framework>,
    pub srl_gamma: f64,
    pub solver: SolverConfig,
}

impl Default for InterRunConfig {
    fn default() -> Self {
        let sim = InterSimConfig::default();
        let fit = InterFitOptions::default();
        Self {
            b: vec![sim.b],
            n: sim.n,
            p: sim.p,
            s: sim.s,
            hierarchy_probs: sim.hierarchy_probs,
            noise_sd: sim.noise_sd,
            n_test: sim.n_test,
            replicates: sim.replicates,
            seed: sim.seed,
            folds: fit.cv_folds,
            frameworks: fit.frameworks,
            srl_gamma: fit.srl_gamma,
            solver: fit.solver,
        }
    }
}

impl InterRunConfig {
    fn validate(&self) -> Result<()> {
        if self.b.is_empty() {
            return usage("--b needs at least one value");
        }
        if self.frameworks.is_empty() {
            return usage("--frameworks needs at least one value");
        }
        if self.folds < 2 || self.folds > self.n {
            return usage(format!("need 2 <= folds <= n, got {}", self.folds));
        }
        if !(self.srl_gamma >= 0.0 && self.srl_gamma.is_finite()) {
            return usage(format!(
                "srl_gamma must be finite and nonnegative, got {}",
                self.srl_gamma
            ));
        }
        for setting in self.settings() {
            if let Err(e) = setting.validate() {
                return usage(e.to_string());
            }
        }
        if let Err(e) = self.solver.validate() {
            return usage(e.to_string());
        }
        Ok(())
    }

    fn settings(&self) -> Vec<InterSimConfig> {
        self.b
            .iter()
            .map(|&b| InterSimConfig {
                n: self.n,
                p: self.p,
                s: self.s,
                b,
                hierarchy_probs: self.hierarchy_probs,
                noise_sd: self.noise_sd,
                n_test: self.n_test,
                replicates: self.replicates,
                seed: self.seed,
            })
            .collect()
    }

    fn fit_options(&self) -> InterFitOptions {
        InterFitOptions {
            frameworks: self.frameworks.clone(),
            cv_folds: self.folds,
            srl_gamma: self.srl_gamma,
            solver: self.solver.clone(),
        }
    }
}

fn write_outputs(run: &mut Run, experiment: &str, rows: &[SimRow], config: Value) -> Result<()> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    run.write(RESULTS_FILE, &buf)?;
    run.write_json(SUMMARY_FILE, &SimSummary::new(experiment, config, rows))?;
    Ok(())
}

fn interactions(args: InterArgs) -> Result<()> {
    let file = args
        .common
        .config
        .as_deref()
        .map(|p| load_config_file(p, "simulate interactions"))
        .transpose()?;
    let entries = vec![
        ("b", args.b.as_ref().map(to_value)),
        ("n", args.n.map(to_value)),
        ("p", args.p.map(to_value)),
        ("s", args.s.map(to_value)),
        ("noise_sd", args.noise_sd.map(to_value)),
        ("n_test", args.n_test.map(to_value)),
        ("replicates", args.replicates.map(to_value)),
        ("seed", args.common.seed.map(to_value)),
        ("folds", args.folds.map(to_value)),
        ("frameworks", args.frameworks.as_ref().map(to_value)),
        ("srl_gamma", args.srl_gamma.map(to_value)),
    ];
    let config: InterRunConfig = resolve(&InterRunConfig::default(), file, flags(entries))?;
    config.validate()?;
    let out = args.common.out.unwrap_or_else(|| PathBuf::from("."));
    let mut run = Run::start("simulate interactions", &out)?;

    let opts = config.fit_options();
    let mut rows = Vec::new();
    for setting in config.settings() {
        log::info!("b={}: {} replicates", setting.b, setting.replicates);
        rows.extend(run_interaction_experiment(&setting, &opts)?);
    }
    let echo = to_value(&config);
    write_outputs(&mut run, INTER_EXPERIMENT, &rows, echo.clone())?;
    run.finish(Some(config.seed), echo)
}

fn poly_tuning(s: Selection) -> Result<PolyTuning> {
    match s {
        Selection::Bic => Ok(PolyTuning::Bic),
        Selection::Cv { folds, repeats } => Ok(PolyTuning::Cv { folds, repeats }),
        Selection::Aic => usage("--tuning accepts bic or cv[:k[:r]]"),
    }
}

fn poly(args: PolyArgs) -> Result<()> {
    let file = args
        .common
        .config
        .as_deref()
        .map(|p| load_config_file(p, "simulate poly"))
        .transpose()?;
    // Defaults depend on the truth, so settle it first.
    let file_truth = match file.as_ref().and_then(|f| f.get("truth")) {
        Some(t) => match serde_json::from_value::<PolyTruth>(t.clone()) {
            Ok(t) => Some(t),
            Err(e) => return usage(format!("invalid truth in config: {e}")),
        },
        None => None,
    };
    let truth = args
        .truth
        .or(file_truth)
        .unwrap_or(PolyTruth::QuadraticFixed);
    let entries = vec![
        ("truth", args.truth.map(to_value)),
        ("orders", args.orders.as_ref().map(to_value)),
        ("replicates", args.replicates.map(to_value)),
        ("n", args.n.map(to_value)),
        ("noise_sd", args.noise_sd.map(to_value)),
        ("eval_points", args.eval_points.map(to_value)),
        (
            "tuning",
            args.tuning.map(poly_tuning).transpose()?.map(to_value),
        ),
        ("gammas", args.gammas.as_ref().map(to_value)),
        ("seed", args.common.seed.map(to_value)),
    ];
    let config: PolySimConfig = resolve(&PolySimConfig::for_truth(truth), file, flags(entries))?;
    if let Err(e) = config.validate() {
        return usage(e.to_string());
    }
    let out = args.common.out.unwrap_or_else(|| PathBuf::from("."));
    let mut run = Run::start("simulate poly", &out)?;

    log::info!(
        "{}: orders {:?}, {} replicates",
        config.truth,
        config.orders,
        config.replicates
    );
    let rows = run_poly_experiment(&config)?;
    let echo = to_value(&config);
    write_outputs(&mut run, POLY_EXPERIMENT, &rows, echo.clone())?;
    run.finish(Some(config.seed), echo)
}

pub fn run(cmd: SimulateCommand) -> Result<()> {
    match cmd {
        SimulateCommand::Interactions(a) => interactions(a),
        SimulateCommand::Poly(a) => poly(a),
    }
}
